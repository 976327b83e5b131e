from dataclasses import dataclass
import numpy as np
from exceptions import DimensionMismatchException, LengthMismatchException

# two distinct elements share the 0.1 weight
WEIGHTS = (0.5, 0.2, 0.1, 0.1, 0.05)

_M_2D = np.array([[0.0, -1.0], [1.0, 0.0]])
_M_A = np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
_M_B = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
_M_C = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]])
_M_D = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
_M_E = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
_M_F = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
_D_AB = np.diag([1.0, 1.0, 0.0])
_D_BC = np.diag([0.0, 1.0, 1.0])

# (tag, family, matrix) in listing order
GENERATORS_2D: tuple[tuple[str, str, np.ndarray], ...] = (
    ("I", "I", np.eye(2)),
    ("M", "M", _M_2D),
    ("-I", "I", -np.eye(2)),
    ("-M", "M", -_M_2D),
)

# 16 generators: ±I, ±skew, ±sym and ±partial diagonals
GENERATORS_3D: tuple[tuple[str, str, np.ndarray], ...] = (
    ("I", "I", np.eye(3)),
    ("-I", "I", -np.eye(3)),
    ("M_a", "skew", _M_A),
    ("-M_a", "skew", -_M_A),
    ("M_b", "skew", _M_B),
    ("-M_b", "skew", -_M_B),
    ("M_c", "skew", _M_C),
    ("-M_c", "skew", -_M_C),
    ("M_d", "sym", _M_D),
    ("-M_d", "sym", -_M_D),
    ("M_e", "sym", _M_E),
    ("-M_e", "sym", -_M_E),
    ("M_f", "sym", _M_F),
    ("-M_f", "sym", -_M_F),
    ("-D_ab", "diag", -_D_AB),
    ("-D_bc", "diag", -_D_BC),
)


@dataclass(frozen=True)
class BasisElement:
    matrix: np.ndarray
    weight: float
    generator: str
    family: str

    @property
    def label(self) -> str:
        if self.generator.startswith("-"):
            return f"-{self.weight:g}*{self.generator[1:]}"
        return f"{self.weight:g}*{self.generator}"


@dataclass(frozen=True)
class RotationBasis:
    dim: int
    elements: tuple[BasisElement, ...]

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def matrices(self) -> np.ndarray:
        """(B, D, D) stack of the element matrices."""
        return np.stack([element.matrix for element in self.elements])

    @property
    def labels(self) -> list[str]:
        return [element.label for element in self.elements]

    @property
    def families(self) -> list[str]:
        return [element.family for element in self.elements]

    def __len__(self):
        return self.size


def _build(dim: int, generators) -> RotationBasis:
    elements = []
    for weight in WEIGHTS:
        for tag, family, generator in generators:
            matrix = weight * generator
            matrix.setflags(write=False)
            elements.append(BasisElement(matrix, weight, tag, family))
    return RotationBasis(dim, tuple(elements))


def build_basis_2d() -> RotationBasis:
    return _build(2, GENERATORS_2D)


def build_basis_3d() -> RotationBasis:
    return _build(3, GENERATORS_3D)


def build_basis(dim: int) -> RotationBasis:
    if dim == 2:
        return build_basis_2d()
    if dim == 3:
        return build_basis_3d()
    raise DimensionMismatchException(f"No rotation basis for dimension {dim}")


def assemble(basis: RotationBasis, bits) -> np.ndarray:
    """Sum of the basis matrices whose bit is set."""
    bits = np.asarray(bits).reshape(-1)
    if bits.size != basis.size:
        raise LengthMismatchException(
            f"Expected {basis.size} bits for the {basis.dim}D basis, got {bits.size}"
        )
    return np.tensordot(bits.astype(np.float64), basis.matrices, axes=1)
