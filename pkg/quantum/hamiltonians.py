"""Dense toy-scale Hamiltonians of the annealing schedule H(s) = (1 - s) H_I + s H_P.

Register convention: qubit 0 is the most significant bit of a basis-state index
and σ^z|0⟩ = +|0⟩, so register bit b_j = 0 carries spin s_j = +1.
"""
from dataclasses import dataclass
from functools import reduce
import numpy as np
from scipy import sparse
from exceptions import (
    DimensionMismatchException,
    InvalidConfigException,
    IsingFormatException,
    TooManyQubitsException,
)
from registration.qubo_builder import IsingProblem

MAX_QUBITS = 12
SYMMETRY_TOLERANCE = 1e-12
NORM_TOLERANCE = 1e-9

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


@dataclass(frozen=True)
class DenseHamiltonian:
    n: int
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.float64)
        if matrix.shape != (1 << self.n, 1 << self.n):
            raise DimensionMismatchException(
                f"A {self.n}-qubit Hamiltonian is {1 << self.n}x{1 << self.n}, got {matrix.shape}"
            )
        if np.max(np.abs(matrix - matrix.T), initial=0.0) > SYMMETRY_TOLERANCE:
            raise ValueError("Hamiltonian is not symmetric")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def dimension(self) -> int:
        return 1 << self.n

    def to_sparse(self) -> sparse.csr_matrix:
        return sparse.csr_matrix(self.matrix)


@dataclass(frozen=True)
class QuantumState:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if amplitudes.shape != (1 << self.n,):
            raise DimensionMismatchException(
                f"A {self.n}-qubit state has {1 << self.n} amplitudes, got {amplitudes.shape}"
            )
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"State is not normalized (|φ|² = {norm})")
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def check_qubits(n: int, limit: int = MAX_QUBITS):
    if n < 1:
        raise TooManyQubitsException(f"Need at least one qubit, got {n}")
    if n > limit:
        raise TooManyQubitsException(f"Dense simulation is limited to {limit} qubits, got {n}")


def register_spins(n: int) -> np.ndarray:
    """(2^n, n) spins of every basis state: +1 for register bit 0, -1 for bit 1."""
    states = np.arange(1 << n)[:, None]
    shifts = np.arange(n - 1, -1, -1)[None, :]
    return 1 - 2 * ((states >> shifts) & 1)


def register_to_qubo_bits(index: int, n: int) -> np.ndarray:
    """QUBO bits of a measured basis state: x_j = (1 + s_j) / 2 = 1 - b_j."""
    bits = (index >> np.arange(n - 1, -1, -1)) & 1
    return (1 - bits).astype(np.int8)


def build_hp(ising: IsingProblem) -> DenseHamiltonian:
    """Diagonal H_P = Σ h_j σ^z_j + Σ J_jk σ^z_j σ^z_k (no offset)."""
    n = ising.size
    check_qubits(n)
    spins = register_spins(n).astype(np.float64)
    diagonal = spins @ ising.h
    for (j, k), value in ising.J.items():
        diagonal += value * spins[:, j] * spins[:, k]
    return DenseHamiltonian(n, np.diag(diagonal))


def build_hi(n: int, bx: float = 1.0) -> DenseHamiltonian:
    """Transverse field H_I = -B_x Σ σ^x_j; ground energy -n·B_x, ground state |+⟩^n."""
    check_qubits(n)
    if not bx > 0.0:
        raise InvalidConfigException(f"B_x must be positive, got {bx}")
    states = np.arange(1 << n)
    matrix = np.zeros((1 << n, 1 << n))
    for qubit in range(n):
        matrix[states, states ^ (1 << qubit)] = -bx
    return DenseHamiltonian(n, matrix)


def interpolate(hi: DenseHamiltonian, hp: DenseHamiltonian, s: float) -> DenseHamiltonian:
    if hi.n != hp.n:
        raise DimensionMismatchException(f"H_I has {hi.n} qubits but H_P has {hp.n}")
    if s == 0.0:
        return hi
    if s == 1.0:
        return hp
    return DenseHamiltonian(hi.n, (1.0 - s) * hi.matrix + s * hp.matrix)


def hadamard_state(n: int) -> QuantumState:
    """H^{⊗n} |0...0⟩, the uniform superposition."""
    zero = np.zeros(1 << n)
    zero[0] = 1.0
    transform = reduce(np.kron, [HADAMARD] * n)
    return QuantumState(n, transform @ zero)


def load_ising(path: str) -> IsingProblem:
    """Reads `h i value` and `J i j value` lines (0-based). Missing fields count as zero."""
    fields: dict[int, float] = {}
    couplings: dict[tuple[int, int], float] = {}
    with open(path, "r", encoding="UTF-8") as stream:
        for line_number, line in enumerate(stream, start=1):
            tokens = line.split()
            if not tokens or tokens[0].startswith("#"):
                continue
            try:
                if tokens[0] == "h" and len(tokens) == 3:
                    i = int(tokens[1])
                    fields[i] = fields.get(i, 0.0) + float(tokens[2])
                    indices = (i,)
                elif tokens[0] == "J" and len(tokens) == 4:
                    i, j = int(tokens[1]), int(tokens[2])
                    if i == j:
                        raise IsingFormatException(f"{path}:{line_number}: self-coupling J {i} {j}")
                    key = (min(i, j), max(i, j))
                    couplings[key] = couplings.get(key, 0.0) + float(tokens[3])
                    indices = key
                else:
                    raise IsingFormatException(f"{path}:{line_number}: cannot parse '{line.strip()}'")
            except ValueError as e:
                raise IsingFormatException(f"{path}:{line_number}: {e}") from e
            if min(indices) < 0:
                raise IsingFormatException(f"{path}:{line_number}: negative spin index")

    used = list(fields) + [index for key in couplings for index in key]
    if not used:
        raise IsingFormatException(f"{path}: no fields or couplings found")
    h = np.zeros(max(used) + 1)
    for i, value in fields.items():
        h[i] = value
    return IsingProblem(h=h, J=couplings, offset=0.0)


def save_ising(ising: IsingProblem, path: str):
    """Writes the `h i value` / `J i j value` format read by load_ising. The offset is not stored."""
    with open(path, "w", encoding="UTF-8") as stream:
        stream.write(f"# offset {ising.offset:.17g}\n")
        for i, value in enumerate(ising.h):
            stream.write(f"h {i} {value:.17g}\n")
        for (i, j), value in sorted(ising.J.items()):
            stream.write(f"J {i} {j} {value:.17g}\n")
