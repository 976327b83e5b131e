from dataclasses import dataclass
import numpy as np
import scipy.linalg
from scipy.sparse.linalg import expm_multiply
from exceptions import (
    DegenerateGapException,
    DimensionMismatchException,
    InvalidScheduleException,
)
from quantum.hamiltonians import (
    DenseHamiltonian,
    QuantumState,
    check_qubits,
    hadamard_state,
    interpolate,
)

MAX_EVOLUTION_QUBITS = 10
MIN_EVOLUTION_STEPS = 100
DEGENERATE_GAP = 1e-10


@dataclass(frozen=True)
class GapCurve:
    s: np.ndarray
    gaps: np.ndarray
    ground_energies: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.s) <= 0.0):
            raise ValueError("Gap curve samples must be strictly ascending in s")

    @property
    def min_gap(self) -> float:
        return float(self.gaps.min())

    @property
    def argmin_s(self) -> float:
        return float(self.s[np.argmin(self.gaps)])

    def rows(self) -> list[tuple[float, float, float]]:
        return list(zip(self.s.tolist(), self.gaps.tolist(), self.ground_energies.tolist()))


def _check_pair(hi: DenseHamiltonian, hp: DenseHamiltonian):
    if hi.n != hp.n:
        raise DimensionMismatchException(f"H_I has {hi.n} qubits but H_P has {hp.n}")


def schedule_grid(grid_points: int) -> np.ndarray:
    if grid_points < 2:
        raise InvalidScheduleException(f"Need at least 2 grid points, got {grid_points}")
    return np.linspace(0.0, 1.0, grid_points)


def gap_curve(hi: DenseHamiltonian, hp: DenseHamiltonian, grid_points: int) -> GapCurve:
    """Two lowest eigenvalues of H(s) on a uniform s grid."""
    _check_pair(hi, hp)
    grid = schedule_grid(grid_points)
    gaps = np.empty(grid.size)
    ground = np.empty(grid.size)
    for index, s in enumerate(grid):
        lowest = scipy.linalg.eigh(
            interpolate(hi, hp, float(s)).matrix, eigvals_only=True, subset_by_index=[0, 1]
        )
        ground[index] = lowest[0]
        gaps[index] = max(lowest[1] - lowest[0], 0.0)
    return GapCurve(grid, gaps, ground)


def annealing_rate_bound(hi: DenseHamiltonian, hp: DenseHamiltonian, grid_points: int) -> float:
    """max over s and m ≥ 1 of |⟨E_m|dH/ds|E_0⟩| / (E_m - E_0)², with dH/ds = H_P - H_I.

    The total anneal time T should be well above this value.
    """
    _check_pair(hi, hp)
    derivative = hp.matrix - hi.matrix
    bound = 0.0
    for s in schedule_grid(grid_points):
        energies, vectors = np.linalg.eigh(interpolate(hi, hp, float(s)).matrix)
        gap = energies[1] - energies[0]
        if gap <= DEGENERATE_GAP:
            raise DegenerateGapException(float(s), float(gap))
        couplings = np.abs(vectors[:, 1:].T @ (derivative @ vectors[:, 0]))
        bound = max(bound, float(np.max(couplings / (energies[1:] - energies[0]) ** 2)))
    return bound


def ground_indices(hp: DenseHamiltonian, tolerance: float = 1e-9) -> np.ndarray:
    """Basis states spanning the ground space of the diagonal H_P."""
    diagonal = np.diag(hp.matrix)
    lowest = diagonal.min()
    return np.flatnonzero(diagonal <= lowest + tolerance * max(1.0, abs(lowest)))


def evolve(
    hi: DenseHamiltonian,
    hp: DenseHamiltonian,
    total_time: float,
    steps: int,
) -> tuple[QuantumState, float]:
    """Propagates |+⟩^n under H(t/T) with one exp(-i H(s_k) Δt) per step, s_k at the step midpoint.

    Returns the final state and its probability mass on the ground space of H_P.
    """
    _check_pair(hi, hp)
    check_qubits(hi.n, MAX_EVOLUTION_QUBITS)
    if steps < MIN_EVOLUTION_STEPS:
        raise InvalidScheduleException(f"Need at least {MIN_EVOLUTION_STEPS} steps, got {steps}")
    if not total_time >= 0.0:
        raise InvalidScheduleException(f"Total time must be non-negative, got {total_time}")

    amplitudes = hadamard_state(hi.n).amplitudes
    if total_time > 0.0:
        h_initial = hi.to_sparse()
        h_problem = hp.to_sparse()
        dt = total_time / steps
        for step in range(steps):
            s = (step + 0.5) / steps
            hamiltonian = (1.0 - s) * h_initial + s * h_problem
            amplitudes = expm_multiply(-1j * dt * hamiltonian, amplitudes)

    state = QuantumState(hi.n, amplitudes)
    overlap = float(state.probabilities[ground_indices(hp)].sum())
    return state, overlap
