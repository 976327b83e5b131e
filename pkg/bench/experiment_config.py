import math
from dataclasses import dataclass, field
from typing import Any
from exceptions import InvalidConfigException

MODES = ("te", "psr")


@dataclass(frozen=True)
class ThetaSweep:
    start: float = 0.0
    end: float = 2.0 * math.pi
    step: float = math.pi / 36.0

    def thetas(self) -> list[float]:
        """start, start + step, ... strictly below end."""
        count = math.ceil((self.end - self.start) / self.step - 1e-9)
        return [self.start + i * self.step for i in range(max(count, 0))]


@dataclass
class ExperimentConfig:
    dataset: str
    mode: str = "te"
    link_degrees: list[int] = field(default_factory=lambda: [1, 10, 20, 30])
    trials: int = 100
    theta_sweep: ThetaSweep = field(default_factory=ThetaSweep)
    noise_ratios: list[float] = field(default_factory=lambda: [0.0, 0.1, 0.2, 0.3, 0.4, 0.5])
    noise_trials: int = 50
    gap_thetas: list[float] = field(
        default_factory=lambda: [math.pi / 8.0, math.pi / 4.0, math.pi / 2.0]
    )
    gap_link_degrees: list[int] = field(default_factory=lambda: [1, 30])
    shrinkage_theta: float = math.pi / 4.0
    heatmap_link_degree: int = 1
    heatmap_theta: float = math.pi / 4.0
    heatmap_noise_ratio: float = 0.0
    sampler: dict[str, Any] = field(default_factory=lambda: {"name": "exhaustive"})
    seed: int = 0
    out: str = "results"
    show_progress: bool = False
    debug: bool = False

    @staticmethod
    def from_config(config: dict[str, Any]) -> "ExperimentConfig":
        """Builds and validates the experiment settings from a merged config dict."""
        experiment = config.get("experiment", {}) or {}
        sweep = experiment.get("theta_sweep", {}) or {}
        gap_study = experiment.get("gap_study", {}) or {}
        heatmap = experiment.get("heatmap", {}) or {}
        defaults = ExperimentConfig(dataset="")
        try:
            experiment_config = ExperimentConfig(
                dataset=str(config.get("dataset", "synthetic:spiral:91")),
                mode=str(experiment.get("mode", defaults.mode)),
                link_degrees=[int(k) for k in experiment.get("link_degrees", defaults.link_degrees)],
                trials=int(experiment.get("trials", defaults.trials)),
                theta_sweep=ThetaSweep(
                    start=float(sweep.get("start", defaults.theta_sweep.start)),
                    end=float(sweep.get("end", defaults.theta_sweep.end)),
                    step=float(sweep.get("step", defaults.theta_sweep.step)),
                ),
                noise_ratios=[float(r) for r in experiment.get("noise_ratios", defaults.noise_ratios)],
                noise_trials=int(experiment.get("noise_trials", defaults.noise_trials)),
                gap_thetas=[float(t) for t in gap_study.get("thetas", defaults.gap_thetas)],
                gap_link_degrees=[
                    int(k) for k in gap_study.get("link_degrees", defaults.gap_link_degrees)
                ],
                shrinkage_theta=float(experiment.get("shrinkage_theta", defaults.shrinkage_theta)),
                heatmap_link_degree=int(heatmap.get("link_degree", defaults.heatmap_link_degree)),
                heatmap_theta=float(heatmap.get("theta", defaults.heatmap_theta)),
                heatmap_noise_ratio=float(heatmap.get("noise_ratio", defaults.heatmap_noise_ratio)),
                sampler=dict(config.get("sampler", {}) or defaults.sampler),
                seed=int(config.get("seed", 0)),
                out=str(config.get("out", defaults.out)),
                show_progress=bool(config.get("show_progress", False)),
                debug=bool(config.get("debug", False)),
            )
        except (TypeError, ValueError) as e:
            raise InvalidConfigException(f"Invalid experiment config: {e}") from e

        errors = experiment_config.validate()
        if errors:
            raise InvalidConfigException("\n".join(errors))
        return experiment_config

    def validate(self) -> list[str]:
        errors = []
        if self.mode not in MODES:
            errors.append(f"experiment.mode must be one of {', '.join(MODES)}, got '{self.mode}'")
        if self.trials < 1:
            errors.append(f"experiment.trials must be at least 1, got {self.trials}")
        if self.noise_trials < 1:
            errors.append(f"experiment.noise_trials must be at least 1, got {self.noise_trials}")
        if not self.theta_sweep.step > 0.0:
            errors.append(f"experiment.theta_sweep.step must be positive, got {self.theta_sweep.step}")
        elif not self.theta_sweep.end > self.theta_sweep.start:
            errors.append("experiment.theta_sweep.end must be greater than start")
        bad_ratios = [r for r in self.noise_ratios + [self.heatmap_noise_ratio] if not 0.0 <= r <= 0.5]
        if bad_ratios:
            errors.append(f"Noise ratios must lie in [0, 0.5], got {bad_ratios}")
        bad_degrees = [
            k for k in self.link_degrees + self.gap_link_degrees + [self.heatmap_link_degree] if k < 1
        ]
        if bad_degrees:
            errors.append(f"Link degrees must be positive, got {bad_degrees}")
        if not self.link_degrees:
            errors.append("experiment.link_degrees must not be empty")
        if self.seed < 0:
            errors.append(f"seed must be non-negative, got {self.seed}")
        return errors

    def sampler_config(self) -> dict[str, Any]:
        """The shape create_sampler expects."""
        return {"sampler": dict(self.sampler), "debug": self.debug}
