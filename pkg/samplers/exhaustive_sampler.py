import numpy as np
from exceptions import TooManyBitsException
from registration.qubo_builder import ReducedQubo
from samplers.kernels import gray_code_energies, state_bits
from samplers.sampler import (
    EnergySpectrum,
    SampleResult,
    Sampler,
    Solution,
    TIE_TOLERANCE,
    exact_energy,
    with_clamped_bit,
)

MAX_EXHAUSTIVE_BITS = 24


def _check_size(reduced: ReducedQubo):
    if reduced.size > MAX_EXHAUSTIVE_BITS:
        raise TooManyBitsException(
            f"Exhaustive enumeration is limited to {MAX_EXHAUSTIVE_BITS} free bits, got {reduced.size}"
        )


def all_energies(reduced: ReducedQubo) -> np.ndarray:
    """Energy of every free-bit state, indexed by state (free bit 0 most significant)."""
    _check_size(reduced)
    return gray_code_energies(
        np.ascontiguousarray(reduced.Q, dtype=np.float64),
        np.ascontiguousarray(reduced.linear, dtype=np.float64),
        float(reduced.constant),
    )


def _ranked(energies: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """States ordered by (energy level, index) and the level id of each ranked state."""
    order = np.argsort(energies, kind="stable")
    ordered = energies[order]
    scale = TIE_TOLERANCE * np.maximum(1.0, np.abs(ordered[:-1]))
    new_level = np.concatenate(([True], np.diff(ordered) > scale))
    level_ids = np.cumsum(new_level) - 1
    ranking = np.lexsort((order, level_ids))
    return order[ranking], level_ids[ranking]


def spectrum_of(energies: np.ndarray) -> EnergySpectrum:
    states, level_ids = _ranked(energies)
    starts = np.flatnonzero(np.concatenate(([True], np.diff(level_ids) != 0)))
    multiplicities = np.diff(np.append(starts, states.size))
    return EnergySpectrum(
        levels=energies[states[starts]],
        multiplicities=multiplicities,
        representatives=states[starts],
    )


def _solution(reduced: ReducedQubo, state: int) -> Solution:
    free = state_bits(int(state), reduced.size)
    return Solution(bits=with_clamped_bit(free), energy=exact_energy(reduced, free))


def solve_exhaustive(reduced: ReducedQubo) -> tuple[Solution, EnergySpectrum]:
    """Global minimum over all 2^B states; ties go to the lexicographically smallest bitstring."""
    energies = all_energies(reduced)
    spectrum = spectrum_of(energies)
    return _solution(reduced, spectrum.representatives[0]), spectrum


def spectrum_slice(reduced: ReducedQubo, m: int) -> list[Solution]:
    """The m lowest-energy states, ascending, lexicographic among ties."""
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    energies = all_energies(reduced)
    states, _ = _ranked(energies)
    return [_solution(reduced, state) for state in states[:m]]


class ExhaustiveSampler(Sampler):
    """Enumerates every state. The oracle the other samplers are checked against."""

    def sample(self, reduced: ReducedQubo, seed: int = 0) -> SampleResult:
        solution, spectrum = solve_exhaustive(reduced)
        return SampleResult(solution=solution, spectrum=spectrum)
