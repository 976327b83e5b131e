import argparse
import os
import sys
from os import path
from typing import Any
import numpy as np
from bench.experiment_config import ExperimentConfig
from bench.pipeline import Instance, misaligned_instance
from bench import protocols
from exceptions import (
    DegenerateGapException,
    InputException,
    InvariantViolationException,
)
from quantum.annealing_simulator import annealing_rate_bound, evolve, gap_curve
from quantum.hamiltonians import build_hi, build_hp, load_ising, save_ising
from registration.geometry import PointSet, center, knn_links, load_point_set, resolve_dataset
from registration.metrics import evaluate
from registration.qubo_builder import IsingProblem, build_phi, build_qubo, reduce_clamped, to_ising
from registration.rotation_basis import build_basis
from registration.unembedding import decode
from samplers.exhaustive_sampler import all_energies, spectrum_of
from samplers.kernels import state_bits
from samplers.sampler import bits_to_hex, create_sampler, with_clamped_bit
from services import csv_writer
from services.config_manager import ConfigManager
from services.printr import Printr

printr = Printr()

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_INTERNAL_ERROR = 2


class QuboAlign:
    def __init__(self):
        self.app_root_dir = path.abspath(path.dirname(__file__))
        self.config_manager = ConfigManager(self.app_root_dir)
        self.config: dict[str, Any] = {}

    # ───────────────────────────── setup ───────────────────────────── #

    def load_config(self, args: argparse.Namespace):
        sampler_overrides = {
            "name": getattr(args, "sampler", None),
            "sa": {
                key: getattr(args, key, None)
                for key in ("sweeps", "restarts")
                if getattr(args, key, None) is not None
            },
        }
        overrides = {
            "seed": getattr(args, "seed", None),
            "out": getattr(args, "out", None),
            "dataset": getattr(args, "dataset", None),
            "debug": True if getattr(args, "debug", False) else None,
            "show_progress": True if getattr(args, "progress", False) else None,
            "sampler": {k: v for k, v in sampler_overrides.items() if v},
        }
        self.config = self.config_manager.get_config(getattr(args, "config", None), overrides)
        printr.set_debug(bool(self.config.get("debug", False)))

    def experiment(self) -> ExperimentConfig:
        return ExperimentConfig.from_config(self.config)

    def reference(self) -> PointSet:
        return resolve_dataset(str(self.config["dataset"]), int(self.config.get("seed", 0)))

    def out_path(self, filename: str) -> str:
        return path.join(str(self.config.get("out", "results")), filename)

    def instance(self, args: argparse.Namespace) -> tuple[Instance, np.ndarray, np.ndarray]:
        """The problem instance of build/solve/spectrum plus the original centroids."""
        reference = self.reference()
        if args.template is None:
            link_degree = args.k if args.mode == "psr" else 1
            instance = misaligned_instance(reference, args.theta, link_degree, mode=args.mode)
            zero = np.zeros(reference.dim)
            return instance, zero, zero

        template = load_point_set(args.template)
        X, ref_centroid = center(reference)
        Y, tmpl_centroid = center(template)
        links = None if args.mode == "te" else knn_links(X, Y, args.k)
        instance = Instance(
            reference=X,
            template=Y,
            links=links,
            clean_template=Y,
            basis=build_basis(X.dim),
            theta=float("nan"),
            link_degree=1 if links is None else args.k,
            noise_ratio=0.0,
        )
        return instance, ref_centroid, tmpl_centroid

    # ───────────────────────────── commands ───────────────────────────── #

    def build(self, args: argparse.Namespace):
        instance, _, _ = self.instance(args)
        phi = build_phi(instance.reference, instance.template, instance.links, instance.basis)
        problem = build_qubo(phi, instance.reference.dim)
        if args.format == "csv":
            csv_writer.write_csv(
                self.out_path("P.csv"),
                [f"q{j}" for j in range(problem.size)],
                problem.P.tolist(),
            )
        else:
            csv_writer.write_coo(self.out_path("P.coo"), problem.P)
        csv_writer.write_json(
            self.out_path("P.json"),
            {
                "dim": problem.dim,
                "basisSize": problem.basis_size,
                "N": instance.reference.size,
                "M": instance.template.size,
                "linkDegree": instance.link_degree,
                "clampedBit": problem.clamped_bit,
            },
        )
        if args.ising:
            os.makedirs(path.dirname(path.abspath(args.ising)), exist_ok=True)
            save_ising(to_ising(reduce_clamped(problem)), args.ising)
        printr.print_info(f"Built a {problem.size}x{problem.size} QUBO in {self.config['out']}")

    def solve(self, args: argparse.Namespace):
        instance, ref_centroid, tmpl_centroid = self.instance(args)
        phi = build_phi(instance.reference, instance.template, instance.links, instance.basis)
        reduced = reduce_clamped(build_qubo(phi, instance.reference.dim))
        sampler = create_sampler(self.config)

        printr.start_execution_benchmark()
        result = sampler.sample(reduced, seed=int(self.config["seed"]))
        printr.print_execution_time(f"sampling with {sampler.name}")

        decoded = decode(result.solution, instance.basis, ref_centroid, tmpl_centroid)
        # a template file carries index correspondences only in te mode
        scored = args.template is None or args.mode == "te"
        report = evaluate(
            decoded.affine.rotation,
            instance.reference,
            instance.template,
            instance.scoring_links,
            qubo_energy=decoded.energy,
            ground_truth=instance.clean_template if scored else None,
        )
        if decoded.degenerate:
            printr.print_warn("The decoded R is rank-deficient; R_projected is not unique.")

        if args.trace:
            if result.trace is None:
                printr.print_warn(f"The {sampler.name} sampler records no trace.")
            else:
                csv_writer.write_csv(
                    args.trace,
                    ("step", "energy", "bits"),
                    [(e.step, e.energy, bits_to_hex(e.bits)) for e in result.trace.events],
                )

        content = decoded.to_dict()
        content["R_affine_t"] = decoded.affine.translation
        content["bits"] = result.solution.hex
        content["metrics"] = report.to_dict()
        csv_writer.write_json(None, content)

    def spectrum(self, args: argparse.Namespace):
        instance, _, _ = self.instance(args)
        phi = build_phi(instance.reference, instance.template, instance.links, instance.basis)
        reduced = reduce_clamped(build_qubo(phi, instance.reference.dim))
        spectrum = spectrum_of(all_energies(reduced))
        levels = min(args.levels, spectrum.levels.size)
        rows = []
        for level in range(levels):
            free = state_bits(int(spectrum.representatives[level]), reduced.size)
            rows.append(
                (
                    spectrum.levels[level],
                    spectrum.multiplicities[level],
                    bits_to_hex(with_clamped_bit(free)),
                )
            )
        csv_writer.write_csv(None, ("energy", "multiplicity", "bits"), rows)
        printr.print_info(f"Δ = {spectrum.gap:.6g}")

    def bench(self, args: argparse.Namespace):
        experiment = self.experiment()
        reference = self.reference()
        sampler = create_sampler(experiment.sampler_config())

        printr.start_execution_benchmark()
        if args.protocol == "misalign":
            rows = protocols.run_misalignment_bench(experiment, reference, sampler)
            csv_writer.write_csv(
                self.out_path("bench_misalign.csv"), protocols.BenchRow.HEADER, [r.as_row() for r in rows]
            )
            printr.box_print(
                [f"k={r.link_degree}: e2d {r.mean_e2d:.4f} ± {r.std_e2d:.4f}, "
                 f"eR {r.mean_eR:.4f} ± {r.std_eR:.4f}" for r in rows],
                "misalignment bench",
            )
        elif args.protocol == "theta":
            rows = protocols.run_theta_sweep(experiment, reference, sampler)
            csv_writer.write_csv(self.out_path("bench_theta.csv"), protocols.THETA_HEADER, rows)
        else:
            rows = protocols.run_noise_sweep(experiment, reference, sampler)
            csv_writer.write_csv(
                self.out_path("bench_noise.csv"), protocols.BenchRow.HEADER, [r.as_row() for r in rows]
            )
        printr.print_execution_time(f"bench {args.protocol}")

    def gap_study(self, args: argparse.Namespace):
        experiment = self.experiment()
        results = protocols.run_gap_study(experiment, self.reference())
        summary = []
        for result in results:
            index = experiment.gap_thetas.index(result.theta)
            csv_writer.write_csv(
                self.out_path(f"gap_trace_k{result.link_degree}_theta{index}.csv"),
                protocols.TRACE_HEADER,
                [(s.step, s.energy, s.bits_hex, s.e2d, s.eR) for s in result.snapshots],
            )
            summary.append(
                (
                    result.theta,
                    result.link_degree,
                    result.sa_energy,
                    result.ground_energy,
                    result.second_energy,
                    result.gap,
                    result.wrong_energy,
                    result.wrong_energy_ratio,
                )
            )
        csv_writer.write_csv(self.out_path("gap_study.csv"), protocols.GAP_SUMMARY_HEADER, summary)

    def p_export(self, args: argparse.Namespace):
        heatmap = protocols.export_p_heatmap_data(self.experiment(), self.reference())
        csv_writer.write_csv(
            self.out_path("p_matrix.csv"),
            ["label"] + heatmap.labels,
            [[label] + row for label, row in zip(heatmap.labels, heatmap.P.tolist())],
        )
        csv_writer.write_csv(
            self.out_path("p_zero_blocks.csv"),
            ("family_a", "family_b", "max_abs", "zero"),
            [(a, b, max_abs, is_zero) for (a, b), (max_abs, is_zero) in heatmap.zero_blocks.items()],
        )

    def shrinkage(self, args: argparse.Namespace):
        experiment = self.experiment()
        sampler = create_sampler(experiment.sampler_config())
        report = protocols.run_shrinkage_demo(experiment, self.reference(), sampler)
        csv_writer.write_csv(self.out_path("shrinkage.csv"), report.HEADER, report.rows())
        printr.box_print(
            [
                f"k=1: σ_max {report.sigma_max_k1:.6g}",
                f"k={report.full_link_degree}: σ_max {report.sigma_max_full:.6g}"
                + (" (degenerate)" if report.degenerate_full else ""),
            ],
            "shrinkage",
        )

    def anneal_sim(self, args: argparse.Namespace):
        settings = dict(self.config.get("anneal_sim", {}) or {})
        for key in ("n", "bx", "grid", "time", "steps"):
            if getattr(args, key) is not None:
                settings[key] = getattr(args, key)

        if args.ising:
            ising = load_ising(args.ising)
        else:
            ising = random_ising(int(settings.get("n", 3)), int(self.config.get("seed", 0)))
        hp = build_hp(ising)
        hi = build_hi(hp.n, float(settings.get("bx", 1.0)))
        grid = int(settings.get("grid", 101))

        curve = gap_curve(hi, hp, grid)
        csv_writer.write_csv(self.out_path("gap_curve.csv"), ("s", "gap", "ground_energy"), curve.rows())

        bound = annealing_rate_bound(hi, hp, grid)
        total_time = settings.get("time")
        total_time = 50.0 * bound if total_time is None else float(total_time)
        steps = int(settings.get("steps", 400))
        _, overlap = evolve(hi, hp, total_time, steps)
        csv_writer.write_csv(
            self.out_path("anneal_overlap.csv"),
            ("n", "bx", "time", "steps", "rate_bound", "min_gap", "ground_overlap"),
            [(hp.n, float(settings.get("bx", 1.0)), total_time, steps, bound, curve.min_gap, overlap)],
        )
        printr.print_info(
            f"min Δ {curve.min_gap:.6g} at s={curve.argmin_s:.3f}, T_min ≫ {bound:.6g}, "
            f"overlap {overlap:.6f} at T={total_time:.6g}"
        )

    def basis(self, args: argparse.Namespace):
        basis = build_basis(args.dim)
        if args.dump:
            for index, element in enumerate(basis.elements):
                csv_writer.write_json(
                    None,
                    {
                        "index": index,
                        "label": element.label,
                        "weight": element.weight,
                        "generator": element.generator,
                        "family": element.family,
                        "matrix": element.matrix,
                    },
                    compact=True,
                )
        else:
            printr.print(f"{basis.dim}D basis, {basis.size} elements")
            printr.print(" ".join(basis.labels))

    # ───────────────────────────── entry ───────────────────────────── #

    def run(self, argv: list[str] | None = None) -> int:
        parser = build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:
            return e.code if isinstance(e.code, int) else EXIT_INPUT_ERROR
        try:
            self.load_config(args)
            getattr(self, args.handler)(args)
        except (InputException, OSError) as e:
            printr.err_print(str(e))
            return EXIT_INPUT_ERROR
        except DegenerateGapException as e:
            printr.err_print(f"{e} Choose a Hamiltonian with a nondegenerate ground state.")
            return EXIT_INPUT_ERROR
        except (InvariantViolationException, AssertionError) as e:
            printr.err_print(f"Internal check failed: {e}")
            return EXIT_INTERNAL_ERROR
        except Exception as e:
            # Everything else...
            printr.err_print(str(e).strip() or type(e).__name__)
            return EXIT_INTERNAL_ERROR
        return EXIT_OK


def random_ising(n: int, seed: int):
    """A chain Ising instance with random fields, used when no --ising file is given."""
    rng = np.random.default_rng(seed)
    h = rng.uniform(-1.0, 1.0, n)
    J = {(i, i + 1): float(rng.uniform(-0.5, 0.5)) for i in range(n - 1)}
    return IsingProblem(h=h, J=J)


class CliParser(argparse.ArgumentParser):
    """Usage errors are input errors."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed (64-bit unsigned)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    common.add_argument("--dataset", default=argparse.SUPPRESS, help="point-set file or synthetic:<kind>[:n]")
    common.add_argument("--config", default=argparse.SUPPRESS, help="YAML/JSON file merged over the defaults")
    common.add_argument("--debug", action="store_true", default=argparse.SUPPRESS, help="print timings and details")
    common.add_argument("--progress", action="store_true", default=argparse.SUPPRESS, help="show progress bars")

    instance = argparse.ArgumentParser(add_help=False)
    instance.add_argument("--template", default=None, help="template point-set file")
    instance.add_argument("--theta", type=float, default=0.0, help="misalignment angle (radians)")
    instance.add_argument("--mode", choices=("te", "psr"), default="te")
    instance.add_argument("--k", type=int, default=1, help="link degree in psr mode")

    sampling = argparse.ArgumentParser(add_help=False)
    sampling.add_argument("--sampler", choices=("exhaustive", "sa"), default=None)
    sampling.add_argument("--sweeps", type=int, default=None)
    sampling.add_argument("--restarts", type=int, default=None)

    parser = CliParser(
        prog="qubo-align",
        description="Rigid point-set alignment as QUBO problems.",
        parents=[common],
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    build = subparsers.add_parser("build", parents=[common, instance], help="emit P and its metadata")
    build.add_argument("--format", choices=("coo", "csv"), default="coo")
    build.add_argument("--ising", default=None, help="also write the Ising form to this file")
    build.set_defaults(handler="build")

    solve = subparsers.add_parser("solve", parents=[common, instance, sampling], help="solve and decode")
    solve.add_argument("--trace", default=None, help="CSV file for the best-so-far trace")
    solve.set_defaults(handler="solve")

    spectrum = subparsers.add_parser("spectrum", parents=[common, instance], help="lowest energy levels")
    spectrum.add_argument("--levels", type=int, default=10)
    spectrum.set_defaults(handler="spectrum")

    bench = subparsers.add_parser("bench", parents=[common, sampling], help="accuracy benches")
    bench.add_argument("protocol", choices=("misalign", "theta", "noise"))
    bench.set_defaults(handler="bench")

    subparsers.add_parser("gap-study", parents=[common, sampling], help="traced SA vs spectrum").set_defaults(
        handler="gap_study"
    )
    subparsers.add_parser("p-export", parents=[common], help="P heatmap data").set_defaults(handler="p_export")
    subparsers.add_parser("shrinkage", parents=[common, sampling], help="full-linking shrinkage").set_defaults(
        handler="shrinkage"
    )

    anneal = subparsers.add_parser("anneal-sim", parents=[common], help="toy-scale annealing physics")
    anneal.add_argument("--n", type=int, default=None)
    anneal.add_argument("--bx", type=float, default=None)
    anneal.add_argument("--ising", default=None, help="Ising file with `h i value` / `J i j value` lines")
    anneal.add_argument("--grid", type=int, default=None)
    anneal.add_argument("--time", type=float, default=None)
    anneal.add_argument("--steps", type=int, default=None)
    anneal.set_defaults(handler="anneal_sim")

    basis = subparsers.add_parser("basis", parents=[common], help="inspect the rotation basis")
    basis.add_argument("--dim", type=int, choices=(2, 3), default=2)
    basis.add_argument("--dump", action="store_true", help="one JSON element per line")
    basis.set_defaults(handler="basis")

    return parser


# ─────────────────────────────────── ↓ START ↓ ─────────────────────────────────────────
if __name__ == "__main__":
    core = QuboAlign()
    sys.exit(core.run())
