"""One registration instance end to end: misalign, link, encode, sample, decode, score."""
import math
from dataclasses import dataclass
import numpy as np
from bench.experiment_config import MODES
from exceptions import DimensionMismatchException, InvalidConfigException
from registration.geometry import (
    LinkSet,
    PointSet,
    add_uniform_outliers,
    center,
    knn_links,
    rotation_2d,
)
from registration.metrics import EvalReport, evaluate
from registration.qubo_builder import (
    QuboProblem,
    ReducedQubo,
    build_phi,
    build_qubo,
    reduce_clamped,
)
from registration.rotation_basis import RotationBasis, build_basis
from registration.unembedding import Decoded, decode
from samplers.sampler import SampleResult, Sampler


@dataclass(frozen=True)
class Instance:
    reference: PointSet
    """Centered reference X."""

    template: PointSet
    """Centered, misaligned template Y (outliers included)."""

    links: LinkSet | None
    """None for index correspondences (transformation estimation)."""

    clean_template: PointSet
    """Misaligned template without outliers, index-matched to X; used for scoring."""

    basis: RotationBasis
    theta: float
    link_degree: int
    noise_ratio: float

    @property
    def target_rotation(self) -> np.ndarray:
        return rotation_2d(self.theta).rotation

    @property
    def scoring_links(self) -> LinkSet:
        return self.links if self.links is not None else LinkSet.identity(self.reference.size)


@dataclass(frozen=True)
class Encoded:
    problem: QuboProblem
    reduced: ReducedQubo


@dataclass(frozen=True)
class TrialResult:
    instance: Instance
    sample: SampleResult
    decoded: Decoded
    report: EvalReport


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def draw_trial(seed: int, trial: int) -> tuple[float, int]:
    """(θ in [0, 2π), outlier seed) of one trial. Benches sharing a seed share their draws."""
    rng = trial_rng(seed, trial)
    theta = float(rng.uniform(0.0, 2.0 * math.pi))
    outlier_seed = int(rng.integers(0, 2**32))
    return theta, outlier_seed


def misaligned_instance(
    reference: PointSet,
    theta: float,
    link_degree: int = 1,
    noise_ratio: float = 0.0,
    noise_seed: int = 0,
    basis: RotationBasis | None = None,
    mode: str = "te",
) -> Instance:
    """Template y_n = Rot(θ)ᵀ x_n, so the sought rotation is Rot(θ).

    Outliers are added and links are computed in the aligned pose, then the
    whole template is misaligned; links keep their template indices. In "te"
    mode k = 1 without outliers uses index correspondences; "psr" always links
    by nearest neighbours.
    """
    X, _ = center(reference)
    if X.dim != 2:
        raise DimensionMismatchException(
            f"The benchmark protocols misalign by a planar angle and need 2D data, got {X.dim}D"
        )
    aligned = add_uniform_outliers(X, noise_ratio, noise_seed)
    rotation = rotation_2d(theta).rotation
    # row-wise y = Rᵀ x
    template, _ = center(PointSet(aligned.points @ rotation))
    clean_template = PointSet(X.points @ rotation)

    if mode not in MODES:
        raise InvalidConfigException(f"Unknown mode '{mode}', choose one of {', '.join(MODES)}")
    if mode == "te" and link_degree == 1 and aligned.size == X.size:
        links = None
    else:
        links = knn_links(X, aligned, link_degree)

    return Instance(
        reference=X,
        template=template,
        links=links,
        clean_template=clean_template,
        basis=basis if basis is not None else build_basis(X.dim),
        theta=theta,
        link_degree=link_degree,
        noise_ratio=noise_ratio,
    )


def encode(instance: Instance, probe=None) -> Encoded:
    phi = build_phi(instance.reference, instance.template, instance.links, instance.basis, probe)
    problem = build_qubo(phi, instance.reference.dim)
    return Encoded(problem=problem, reduced=reduce_clamped(problem))


def score(instance: Instance, decoded: Decoded) -> EvalReport:
    return evaluate(
        decoded.affine.rotation,
        instance.reference,
        instance.template,
        instance.scoring_links,
        qubo_energy=decoded.energy,
        ground_truth=instance.clean_template,
    )


def run_trial(instance: Instance, sampler: Sampler, seed: int = 0) -> TrialResult:
    encoded = encode(instance)
    sample = sampler.sample(encoded.reduced, seed=seed)
    zero = np.zeros(instance.reference.dim)
    decoded = decode(sample.solution, instance.basis, zero, zero)
    return TrialResult(instance=instance, sample=sample, decoded=decoded, report=score(instance, decoded))
