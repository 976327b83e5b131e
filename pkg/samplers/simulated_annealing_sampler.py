from dataclasses import dataclass
from typing import Any
import numpy as np
from exceptions import InvalidScheduleException
from registration.qubo_builder import ReducedQubo
from samplers.kernels import anneal_chain
from samplers.sampler import (
    SampleResult,
    Sampler,
    Solution,
    Trace,
    TraceEvent,
    exact_energy,
    with_clamped_bit,
)

DEFAULT_RESTARTS = 64
DEFAULT_SWEEPS = 5000
T_END_RATIO = 1e-3


@dataclass(frozen=True)
class SaSchedule:
    t_start: float
    t_end: float
    sweeps: int = DEFAULT_SWEEPS
    restarts: int = DEFAULT_RESTARTS

    def validate(self) -> list[str]:
        errors = []
        if not (np.isfinite(self.t_start) and np.isfinite(self.t_end)):
            errors.append("Temperatures must be finite.")
        elif not self.t_start > self.t_end > 0.0:
            errors.append(
                f"Need t_start > t_end > 0, got t_start={self.t_start}, t_end={self.t_end}."
            )
        if self.sweeps < 1:
            errors.append(f"sweeps must be at least 1, got {self.sweeps}.")
        if self.restarts < 1:
            errors.append(f"restarts must be at least 1, got {self.restarts}.")
        return errors

    @staticmethod
    def default_for(
        reduced: ReducedQubo,
        sweeps: int = DEFAULT_SWEEPS,
        restarts: int = DEFAULT_RESTARTS,
        t_start: float | None = None,
        t_end: float | None = None,
    ) -> "SaSchedule":
        """T_start spans the largest possible single-flip delta, T_end = 1e-3 · T_start."""
        if t_start is None:
            Q = np.abs(reduced.Q)
            off_diagonal = Q.sum(axis=1) - np.diag(Q)
            max_delta = float(np.max(np.abs(reduced.linear) + np.diag(Q) + 2.0 * off_diagonal))
            t_start = max_delta if max_delta > 0.0 else 1.0
        if t_end is None:
            t_end = T_END_RATIO * t_start
        return SaSchedule(t_start=t_start, t_end=t_end, sweeps=sweeps, restarts=restarts)


def restart_seeds(seed: int, restarts: int) -> list[int]:
    """Counter-based split of the master seed, one independent stream per restart."""
    return [
        int(np.random.SeedSequence(seed, spawn_key=(restart,)).generate_state(1)[0])
        for restart in range(restarts)
    ]


def solve_sa(reduced: ReducedQubo, schedule: SaSchedule, seed: int) -> tuple[Solution, Trace]:
    """Best state over independent Metropolis restarts.

    Every restart's best-so-far events are rescored exactly and merged into one
    trace of strict improvements; the returned solution is its final event, so
    among exactly equal energies the earliest found wins.
    """
    errors = schedule.validate()
    if errors:
        raise InvalidScheduleException(" ".join(errors))

    Q = np.ascontiguousarray(reduced.Q, dtype=np.float64)
    linear = np.ascontiguousarray(reduced.linear, dtype=np.float64)
    steps_per_chain = schedule.sweeps * reduced.size

    trace = Trace()
    for restart, chain_seed in enumerate(restart_seeds(seed, schedule.restarts)):
        _, _, steps, _, event_bits = anneal_chain(
            Q,
            linear,
            float(reduced.constant),
            schedule.sweeps,
            schedule.t_start,
            schedule.t_end,
            chain_seed,
        )
        for step, event in zip(steps, event_bits):
            energy = exact_energy(reduced, event)
            if energy < (trace.final_energy if trace.events else np.inf):
                trace.events.append(
                    TraceEvent(
                        step=int(restart * steps_per_chain + step),
                        energy=energy,
                        bits=with_clamped_bit(event),
                    )
                )

    final = trace.events[-1]
    solution = Solution(bits=final.bits.copy(), energy=final.energy)
    return solution, trace


class SimulatedAnnealingSampler(Sampler):
    def __init__(self, name: str, config: dict[str, Any]):
        super().__init__(name, config)
        self.sa_config: dict[str, Any] = config.get("sa", {}) or {}

    def validate(self) -> list[str]:
        errors = super().validate()
        for key in ("restarts", "sweeps"):
            value = self.sa_config.get(key)
            if value is not None and (not isinstance(value, int) or value < 1):
                errors.append(f"sampler.sa.{key} must be a positive integer")
        return errors

    def schedule_for(self, reduced: ReducedQubo) -> SaSchedule:
        return SaSchedule.default_for(
            reduced,
            sweeps=self.sa_config.get("sweeps") or DEFAULT_SWEEPS,
            restarts=self.sa_config.get("restarts") or DEFAULT_RESTARTS,
            t_start=self.sa_config.get("t_start"),
            t_end=self.sa_config.get("t_end"),
        )

    def sample(self, reduced: ReducedQubo, seed: int = 0) -> SampleResult:
        solution, trace = solve_sa(reduced, self.schedule_for(reduced), seed)
        return SampleResult(solution=solution, trace=trace)
