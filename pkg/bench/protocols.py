"""Experiment protocols. Every protocol is deterministic in (config, seed) and
returns rows ordered by (condition, trial)."""
import sys
from dataclasses import dataclass, field
import numpy as np
from tqdm import tqdm
from bench.experiment_config import ExperimentConfig
from bench.pipeline import (
    Instance,
    TrialResult,
    draw_trial,
    encode,
    misaligned_instance,
    run_trial,
)
from exceptions import InvariantViolationException
from registration.geometry import PointSet
from registration.metrics import alignment_error, residual_energy, transformation_discrepancy
from registration.qubo_builder import zero_blocks
from registration.unembedding import decode
from samplers.exhaustive_sampler import solve_exhaustive, spectrum_slice
from samplers.sampler import Sampler, Solution
from samplers.simulated_annealing_sampler import SimulatedAnnealingSampler
from services.printr import Printr

printr = Printr()

ENERGY_CONSISTENCY = 1e-9


@dataclass(frozen=True)
class BenchRow:
    link_degree: int
    theta: float | None
    noise_ratio: float | None
    mean_e2d: float
    std_e2d: float
    mean_eR: float
    std_eR: float
    min_e2d: float
    max_e2d: float
    trials: int

    HEADER = (
        "k",
        "theta",
        "noise_ratio",
        "mean_e2d",
        "sigma_2d",
        "mean_eR",
        "sigma_R",
        "min_e2d",
        "max_e2d",
        "trials",
    )

    @staticmethod
    def from_trials(
        link_degree: int,
        e2d: list[float],
        eR: list[float],
        theta: float | None = None,
        noise_ratio: float | None = None,
    ) -> "BenchRow":
        e2d_values = np.asarray(e2d, dtype=np.float64)
        eR_values = np.asarray(eR, dtype=np.float64)
        return BenchRow(
            link_degree=link_degree,
            theta=theta,
            noise_ratio=noise_ratio,
            mean_e2d=float(e2d_values.mean()),
            std_e2d=float(e2d_values.std()),
            mean_eR=float(eR_values.mean()),
            std_eR=float(eR_values.std()),
            min_e2d=float(e2d_values.min()),
            max_e2d=float(e2d_values.max()),
            trials=int(e2d_values.size),
        )

    def as_row(self) -> tuple:
        return (
            self.link_degree,
            self.theta,
            self.noise_ratio,
            self.mean_e2d,
            self.std_e2d,
            self.mean_eR,
            self.std_eR,
            self.min_e2d,
            self.max_e2d,
            self.trials,
        )


def _progress(iterable, config: ExperimentConfig, description: str):
    return tqdm(
        iterable,
        desc=description,
        file=sys.stderr,
        disable=not config.show_progress,
        leave=False,
    )


def _check_energy(result: TrialResult):
    report = result.report
    if abs(report.qubo_energy - report.residual_energy) > ENERGY_CONSISTENCY * max(
        1.0, abs(report.qubo_energy)
    ):
        raise InvariantViolationException(
            f"QUBO energy {report.qubo_energy} disagrees with the residual {report.residual_energy}"
        )


def _trial(instance: Instance, sampler: Sampler, seed: int) -> TrialResult:
    result = run_trial(instance, sampler, seed)
    _check_energy(result)
    if result.decoded.degenerate:
        printr.print_warn(
            f"Decoded R is rank-deficient (k={instance.link_degree}, θ={instance.theta:.4f})"
        )
    return result


# ───────────────────────────── accuracy benches ───────────────────────────── #


def run_misalignment_bench(
    config: ExperimentConfig, reference: PointSet, sampler: Sampler
) -> list[BenchRow]:
    """Random θ in [0, 2π) per trial, one row per link degree."""
    rows = []
    for k in config.link_degrees:
        e2d, eR = [], []
        for trial in _progress(range(config.trials), config, f"misalign k={k}"):
            theta, _ = draw_trial(config.seed, trial)
            instance = misaligned_instance(reference, theta, k, mode=config.mode)
            result = _trial(instance, sampler, config.seed + trial)
            e2d.append(result.report.e2d)
            eR.append(result.report.eR)
        rows.append(BenchRow.from_trials(k, e2d, eR))
        printr.print_debug(f"k={k}: mean e2d {rows[-1].mean_e2d:.4f}, mean eR {rows[-1].mean_eR:.4f}")
    return rows


THETA_HEADER = ("k", "theta", "e2d", "eR", "energy", "degenerate")


def run_theta_sweep(config: ExperimentConfig, reference: PointSet, sampler: Sampler) -> list[tuple]:
    """(k, θ, e2d, eR, energy, degenerate) for every θ of the sweep and every link degree."""
    rows = []
    thetas = config.theta_sweep.thetas()
    for k in config.link_degrees:
        for index, theta in enumerate(_progress(thetas, config, f"theta k={k}")):
            instance = misaligned_instance(reference, theta, k, mode=config.mode)
            result = _trial(instance, sampler, config.seed + index)
            rows.append(
                (
                    k,
                    theta,
                    result.report.e2d,
                    result.report.eR,
                    result.decoded.energy,
                    result.decoded.degenerate,
                )
            )
    return rows


def run_noise_sweep(
    config: ExperimentConfig, reference: PointSet, sampler: Sampler
) -> list[BenchRow]:
    """Uniform outliers at every ratio, scored against the clean template."""
    rows = []
    for ratio in config.noise_ratios:
        for k in config.link_degrees:
            e2d, eR = [], []
            for trial in _progress(range(config.noise_trials), config, f"noise {ratio:g} k={k}"):
                theta, outlier_seed = draw_trial(config.seed, trial)
                instance = misaligned_instance(reference, theta, k, ratio, outlier_seed, mode=config.mode)
                result = _trial(instance, sampler, config.seed + trial)
                e2d.append(result.report.e2d)
                eR.append(result.report.eR)
            rows.append(BenchRow.from_trials(k, e2d, eR, noise_ratio=ratio))
    return rows


# ───────────────────────────── structure studies ───────────────────────────── #


@dataclass
class TraceSnapshot:
    step: int
    energy: float
    bits_hex: str
    e2d: float
    eR: float


@dataclass
class GapStudyResult:
    theta: float
    link_degree: int
    sa_energy: float
    ground_energy: float
    second_energy: float
    gap: float
    wrong_energy: float
    """Residual of the ground R turned by an extra π."""

    snapshots: list[TraceSnapshot] = field(default_factory=list)

    @property
    def wrong_energy_ratio(self) -> float:
        return self.wrong_energy / self.ground_energy if self.ground_energy > 0.0 else float("inf")


GAP_SUMMARY_HEADER = (
    "theta",
    "k",
    "sa_energy",
    "ground_energy",
    "second_energy",
    "gap",
    "wrong_energy",
    "wrong_energy_ratio",
)
TRACE_HEADER = ("step", "energy", "bits", "e2d", "eR")


def run_gap_study(config: ExperimentConfig, reference: PointSet) -> list[GapStudyResult]:
    """Traced SA runs next to the exhaustive spectrum of the same instances."""
    sampler = SimulatedAnnealingSampler("sa", dict(config.sampler))
    results = []
    for k in config.gap_link_degrees:
        for theta in config.gap_thetas:
            instance = misaligned_instance(reference, theta, k, mode=config.mode)
            encoded = encode(instance)
            sample = sampler.sample(encoded.reduced, seed=config.seed)
            ground, spectrum = solve_exhaustive(encoded.reduced)
            if sample.solution.energy < ground.energy - ENERGY_CONSISTENCY * max(1.0, abs(ground.energy)):
                raise InvariantViolationException(
                    f"SA energy {sample.solution.energy} is below the exhaustive minimum {ground.energy}"
                )

            zero = np.zeros(instance.reference.dim)
            snapshots = []
            for event in sample.trace.events:
                decoded = decode(Solution(event.bits, event.energy), instance.basis, zero, zero)
                snapshots.append(
                    TraceSnapshot(
                        step=event.step,
                        energy=event.energy,
                        bits_hex=Solution(event.bits, event.energy).hex,
                        e2d=alignment_error(
                            decoded.affine.rotation, instance.reference, instance.clean_template
                        ),
                        eR=transformation_discrepancy(decoded.affine.rotation),
                    )
                )

            ground_rotation = decode(ground, instance.basis, zero, zero).affine.rotation
            wrong = residual_energy(
                -ground_rotation,
                instance.reference,
                instance.template,
                instance.scoring_links,
            )
            levels = spectrum.levels
            results.append(
                GapStudyResult(
                    theta=theta,
                    link_degree=k,
                    sa_energy=sample.solution.energy,
                    ground_energy=ground.energy,
                    second_energy=float(levels[1]) if levels.size > 1 else ground.energy,
                    gap=spectrum.gap,
                    wrong_energy=wrong,
                    snapshots=snapshots,
                )
            )
    return results


def lowest_states(instance: Instance, m: int) -> list[tuple[Solution, float]]:
    """The m lowest exhaustive states with the e2d of their decoded R."""
    encoded = encode(instance)
    zero = np.zeros(instance.reference.dim)
    states = []
    for solution in spectrum_slice(encoded.reduced, m):
        rotation = decode(solution, instance.basis, zero, zero).affine.rotation
        states.append(
            (solution, alignment_error(rotation, instance.reference, instance.clean_template))
        )
    return states


@dataclass
class PHeatmap:
    P: np.ndarray
    labels: list[str]
    zero_blocks: dict[tuple[str, str], tuple[float, bool]]


def export_p_heatmap_data(config: ExperimentConfig, reference: PointSet) -> PHeatmap:
    """P of the configured heatmap instance plus a report of its exactly-zero family blocks."""
    _, outlier_seed = draw_trial(config.seed, 0)
    instance = misaligned_instance(
        reference,
        config.heatmap_theta,
        config.heatmap_link_degree,
        config.heatmap_noise_ratio,
        outlier_seed,
        mode=config.mode,
    )
    problem = encode(instance).problem
    return PHeatmap(
        P=np.array(problem.P),
        labels=["clamp"] + instance.basis.labels,
        zero_blocks=zero_blocks(problem, instance.basis),
    )


@dataclass
class ShrinkageReport:
    theta: float
    sigma_max_k1: float
    sigma_max_full: float
    degenerate_k1: bool
    degenerate_full: bool
    full_link_degree: int

    HEADER = ("theta", "k", "sigma_max", "degenerate")

    def rows(self) -> list[tuple]:
        return [
            (self.theta, 1, self.sigma_max_k1, self.degenerate_k1),
            (self.theta, self.full_link_degree, self.sigma_max_full, self.degenerate_full),
        ]


def run_shrinkage_demo(config: ExperimentConfig, reference: PointSet, sampler: Sampler) -> ShrinkageReport:
    """Decoded R with k = 1 against full linking k = M. Full linking must shrink R."""
    results = {}
    for k in (1, reference.size):
        instance = misaligned_instance(reference, config.shrinkage_theta, k, mode=config.mode)
        results[k] = _trial(instance, sampler, config.seed)

    single, full = results[1].decoded, results[reference.size].decoded
    report = ShrinkageReport(
        theta=config.shrinkage_theta,
        sigma_max_k1=float(single.singular_values[0]),
        sigma_max_full=float(full.singular_values[0]),
        degenerate_k1=single.degenerate,
        degenerate_full=full.degenerate,
        full_link_degree=reference.size,
    )
    if not report.sigma_max_full < report.sigma_max_k1:
        raise InvariantViolationException(
            f"Full linking did not shrink the template: σ_max {report.sigma_max_full} "
            f"(k={reference.size}) vs {report.sigma_max_k1} (k=1)"
        )
    return report
