from dataclasses import dataclass
import numpy as np
from scipy.spatial.distance import cdist
from exceptions import CardinalityMismatchException, ZeroReferenceException
from registration.geometry import LinkSet, PointSet, RigidTransform


@dataclass(frozen=True)
class EvalReport:
    e2d: float | None
    """None when there is no ground-truth correspondence (registration with N != M)."""

    eR: float
    gpe: float
    qubo_energy: float
    residual_energy: float

    def to_dict(self) -> dict:
        return {
            "e2d": self.e2d,
            "eR": self.eR,
            "gpe": self.gpe,
            "qubo_energy": self.qubo_energy,
            "residual_energy": self.residual_energy,
        }


def alignment_error(R: np.ndarray, X: PointSet, Y: PointSet) -> float:
    """‖RY - X‖_HS / ‖X‖_HS over index-matched points."""
    if X.size != Y.size:
        raise CardinalityMismatchException(
            f"Alignment error needs index correspondences, got {X.size} and {Y.size} points"
        )
    reference_norm = np.linalg.norm(X.points)
    if reference_norm == 0.0:
        raise ZeroReferenceException("The reference point set has zero norm.")
    return float(np.linalg.norm(Y.points @ np.asarray(R).T - X.points) / reference_norm)


def transformation_discrepancy(R: np.ndarray) -> float:
    """e_R = ‖I - RRᵀ‖_HS, zero iff R is orthogonal."""
    R = np.asarray(R, dtype=np.float64)
    return float(np.linalg.norm(np.eye(R.shape[0]) - R @ R.T))


def discrepancy_from_eigenvalues(R: np.ndarray) -> float:
    """e_R again, via the eigenvalues of the symmetric RRᵀ."""
    R = np.asarray(R, dtype=np.float64)
    eigenvalues = np.linalg.eigvalsh(R @ R.T)
    return float(np.sqrt(np.sum((1.0 - eigenvalues) ** 2)))


def gpe(
    transform: RigidTransform,
    X: PointSet,
    Y: PointSet,
    reference_masses: np.ndarray | None = None,
    template_masses: np.ndarray | None = None,
) -> float:
    """Σ_m Σ_n μ_m μ_n ‖R y_m + t - x_n‖ over all pairs (unsquared distances)."""
    moved = Y.points @ transform.rotation.T + transform.translation
    distances = cdist(moved, X.points)
    mu_y = np.ones(Y.size) if template_masses is None else np.asarray(template_masses, dtype=np.float64)
    mu_x = np.ones(X.size) if reference_masses is None else np.asarray(reference_masses, dtype=np.float64)
    return float(mu_y @ distances @ mu_x)


def residual_energy(R: np.ndarray, X: PointSet, Y: PointSet, links: LinkSet) -> float:
    """Σ_n Σ_l ‖x_n - R y_l‖², the quantity qᵀPq encodes."""
    reference_index, template_index = links.pairs()
    diff = X.points[reference_index] - Y.points[template_index] @ np.asarray(R).T
    return float(np.sum(diff * diff))


def evaluate(
    R: np.ndarray,
    X: PointSet,
    Y: PointSet,
    links: LinkSet,
    qubo_energy: float,
    ground_truth: PointSet | None = None,
) -> EvalReport:
    """All metrics for the raw affine R of one solution, on centered X and Y.

    e2d is measured against `ground_truth`, the index-matched template, and is
    None without one.
    """
    R = np.asarray(R, dtype=np.float64)
    e2d = alignment_error(R, X, ground_truth) if ground_truth is not None else None
    return EvalReport(
        e2d=e2d,
        eR=transformation_discrepancy(R),
        gpe=gpe(RigidTransform(R, np.zeros(R.shape[0])), X, Y),
        qubo_energy=qubo_energy,
        residual_energy=residual_energy(R, X, Y, links),
    )
