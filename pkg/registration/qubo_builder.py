from dataclasses import dataclass, field
import numpy as np
from exceptions import (
    CardinalityMismatchException,
    DimensionMismatchException,
    InvalidLinkDegreeException,
    LengthMismatchException,
    NotCenteredException,
)
from registration.geometry import LinkSet, PointSet
from registration.rotation_basis import RotationBasis

CENTERED_TOLERANCE = 1e-9
CLAMPED_BIT = 0


@dataclass
class OperationProbe:
    """Counts the work done while building Φ."""

    basis_products: int = 0
    """Q_k y_m products computed (each distinct linked template point once per basis element)."""

    subcolumn_placements: int = 0
    """-[Q_k y]ᵀ subcolumns written into Φ, one per (n, link, k) triple."""


@dataclass(frozen=True)
class QuboProblem:
    """P = ΦΦᵀ over q = [clamped bit, b_1 .. b_B]; bit 0 is fixed to 1."""

    P: np.ndarray
    dim: int
    basis_size: int
    clamped_bit: int = CLAMPED_BIT

    @property
    def size(self) -> int:
        return self.P.shape[0]


@dataclass(frozen=True)
class ReducedQubo:
    """E(b) = bᵀQb + linearᵀb + constant over the B free bits."""

    Q: np.ndarray
    linear: np.ndarray
    constant: float

    @property
    def size(self) -> int:
        return self.Q.shape[0]


@dataclass(frozen=True)
class IsingProblem:
    """E(s) = Σ h_i s_i + Σ_{i<j} J_ij s_i s_j (+ offset to recover the QUBO energy)."""

    h: np.ndarray
    J: dict[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0

    @property
    def size(self) -> int:
        return self.h.shape[0]

    def coupling_matrix(self) -> np.ndarray:
        """Upper-triangular dense view of J."""
        matrix = np.zeros((self.size, self.size))
        for (i, j), value in self.J.items():
            matrix[i, j] = value
        return matrix


def _check_centered(point_set: PointSet, name: str):
    if np.linalg.norm(point_set.centroid) >= CENTERED_TOLERANCE:
        raise NotCenteredException(f"The {name} point set must be centered first.")


def build_phi(
    reference: PointSet,
    template: PointSet,
    links: LinkSet | None,
    basis: RotationBasis,
    probe: OperationProbe | None = None,
) -> np.ndarray:
    """Stacks Φ = [Φ_1 ... Φ_N] of shape (B+1, D·ΣL(n)).

    Column block n repeats x_n in the first row and holds -[Q_k y^n_l] below it.
    Each distinct template point is multiplied with the basis only once and the
    product is reused by every block that links to it.
    """
    if reference.dim != template.dim or reference.dim != basis.dim:
        raise DimensionMismatchException(
            f"Dimensions differ: reference {reference.dim}D, template {template.dim}D, "
            f"basis {basis.dim}D"
        )
    _check_centered(reference, "reference")
    _check_centered(template, "template")

    if links is None:
        if reference.size != template.size:
            raise CardinalityMismatchException(
                f"Index correspondences need N = M, got {reference.size} and {template.size}"
            )
        links = LinkSet.identity(reference.size)
    if len(links) != reference.size:
        raise LengthMismatchException(
            f"Link set covers {len(links)} reference points, expected {reference.size}"
        )

    reference_index, template_index = links.pairs()
    if np.any(template_index >= template.size):
        raise InvalidLinkDegreeException("Link set points outside the template.")

    used = np.unique(template_index)
    # (B, M, D): Q_k y_m for every linked template point, computed once
    products = np.zeros((basis.size, template.size, template.dim))
    products[:, used, :] = np.einsum("kij,mj->kmi", basis.matrices, template.points[used])

    columns = reference_index.size * reference.dim
    phi = np.empty((basis.size + 1, columns))
    phi[0] = reference.points[reference_index].reshape(-1)
    phi[1:] = -products[:, template_index, :].reshape(basis.size, columns)

    if probe is not None:
        probe.basis_products += basis.size * used.size
        probe.subcolumn_placements += basis.size * template_index.size
    return phi


def build_phi_te(reference: PointSet, template: PointSet, basis: RotationBasis, probe=None):
    return build_phi(reference, template, None, basis, probe)


def build_phi_psr(
    reference: PointSet, template: PointSet, links: LinkSet, basis: RotationBasis, probe=None
):
    return build_phi(reference, template, links, basis, probe)


def build_qubo(phi: np.ndarray, dim: int) -> QuboProblem:
    if not np.all(np.isfinite(phi)):
        raise ValueError("Φ contains non-finite entries")
    P = phi @ phi.T
    # BLAS may round the two triangles differently
    P = 0.5 * (P + P.T)
    P.setflags(write=False)
    return QuboProblem(P=P, dim=dim, basis_size=phi.shape[0] - 1)


def reduce_clamped(problem: QuboProblem) -> ReducedQubo:
    """Eliminates the clamped bit: qᵀPq with q = [1, b] becomes bᵀQb + linearᵀb + constant."""
    P = problem.P
    return ReducedQubo(
        Q=np.array(P[1:, 1:]),
        linear=2.0 * np.array(P[0, 1:]),
        constant=float(P[0, 0]),
    )


def to_ising(reduced: ReducedQubo) -> IsingProblem:
    """Substitutes x_i = (1 + s_i) / 2.

    Each unordered pair is counted once in J, so J_ij = Q_ij / 2 for i < j.
    """
    Q = reduced.Q
    n = reduced.size
    off_diagonal = Q - np.diag(np.diag(Q))
    h = 0.5 * (np.diag(Q) + reduced.linear) + 0.5 * off_diagonal.sum(axis=1)
    J = {
        (i, j): 0.5 * float(Q[i, j])
        for i in range(n)
        for j in range(i + 1, n)
        if Q[i, j] != 0.0
    }
    offset = (
        reduced.constant
        + 0.5 * float(np.sum(np.diag(Q)) + np.sum(reduced.linear))
        + 0.25 * float(off_diagonal.sum())
    )
    return IsingProblem(h=h, J=J, offset=offset)


# ───────────────────────────── energy evaluation ───────────────────────────── #


def qubo_energy(problem: QuboProblem, q) -> float:
    q = np.asarray(q, dtype=np.float64)
    if q.size != problem.size:
        raise LengthMismatchException(f"Expected {problem.size} bits, got {q.size}")
    return float(q @ problem.P @ q)


def reduced_energy(reduced: ReducedQubo, bits) -> float:
    b = np.asarray(bits, dtype=np.float64)
    if b.size != reduced.size:
        raise LengthMismatchException(f"Expected {reduced.size} bits, got {b.size}")
    return float(b @ reduced.Q @ b + reduced.linear @ b + reduced.constant)


def ising_energy(ising: IsingProblem, spins) -> float:
    """Energy without the offset."""
    s = np.asarray(spins, dtype=np.float64)
    energy = float(ising.h @ s)
    for (i, j), value in ising.J.items():
        energy += value * s[i] * s[j]
    return energy


def zero_blocks(problem: QuboProblem, basis: RotationBasis, tolerance: float = 1e-12):
    """Max |P_jk| for every pair of generator families, over free rows only.

    Returns {(family_a, family_b): (max_abs, is_zero)}.
    """
    families = np.array(basis.families)
    free = problem.P[1:, 1:]
    report = {}
    for family_a in dict.fromkeys(basis.families):
        for family_b in dict.fromkeys(basis.families):
            block = free[np.ix_(families == family_a, families == family_b)]
            max_abs = float(np.max(np.abs(block))) if block.size else 0.0
            report[(family_a, family_b)] = (max_abs, max_abs <= tolerance)
    return report
