from dataclasses import dataclass
import numpy as np
from exceptions import ClampViolatedException, LengthMismatchException
from registration.geometry import RigidTransform
from registration.rotation_basis import RotationBasis, assemble
from samplers.sampler import Solution

# smallest singular value below this marks a collapsed (rank-deficient) R
DEGENERATE_SINGULAR_VALUE = 1e-12


@dataclass(frozen=True)
class Projection:
    rotation: np.ndarray
    """Closest proper rotation in the Hilbert-Schmidt sense."""

    degenerate: bool
    """True if the input was (numerically) rank-deficient. The rotation is still valid."""

    singular_values: np.ndarray


@dataclass(frozen=True)
class Decoded:
    """Everything `solve` reports about one solution."""

    affine: RigidTransform
    rotation: np.ndarray
    translation: np.ndarray
    degenerate: bool
    energy: float
    singular_values: np.ndarray

    @property
    def projected(self) -> RigidTransform:
        return RigidTransform(self.rotation, self.translation)

    def to_dict(self) -> dict:
        return {
            "R_affine": self.affine.rotation,
            "R_projected": self.rotation,
            "t": self.translation,
            "degenerate": self.degenerate,
            "energy": self.energy,
            "singular_values": self.singular_values,
        }


def unembed(
    solution: Solution,
    basis: RotationBasis,
    ref_centroid: np.ndarray,
    tmpl_centroid: np.ndarray,
) -> RigidTransform:
    """R = Σ q_{k+1} Q_k (unprojected) and t = ref_centroid - R · tmpl_centroid."""
    bits = np.asarray(solution.bits).reshape(-1)
    if bits.size != basis.size + 1:
        raise LengthMismatchException(
            f"Expected {basis.size + 1} bits (clamped bit included), got {bits.size}"
        )
    if bits[0] != 1:
        raise ClampViolatedException("The clamped bit of the solution is 0.")
    rotation = assemble(basis, bits[1:])
    translation = np.asarray(ref_centroid, dtype=np.float64) - rotation @ np.asarray(
        tmpl_centroid, dtype=np.float64
    )
    return RigidTransform(rotation, translation)


def project_to_rotation(affine: np.ndarray) -> Projection:
    """Nearest proper rotation U · diag(1, .., 1, det(UVᵀ)) · Vᵀ from the SVD of `affine`."""
    affine = np.asarray(affine, dtype=np.float64)
    if not np.all(np.isfinite(affine)):
        raise ValueError("Cannot project a matrix with non-finite entries")
    U, singular_values, Vt = np.linalg.svd(affine)
    correction = np.ones(affine.shape[0])
    correction[-1] = np.sign(np.linalg.det(U @ Vt))
    rotation = (U * correction) @ Vt
    return Projection(
        rotation=rotation,
        degenerate=bool(singular_values[-1] < DEGENERATE_SINGULAR_VALUE),
        singular_values=singular_values,
    )


def decode(
    solution: Solution,
    basis: RotationBasis,
    ref_centroid: np.ndarray,
    tmpl_centroid: np.ndarray,
) -> Decoded:
    affine = unembed(solution, basis, ref_centroid, tmpl_centroid)
    projection = project_to_rotation(affine.rotation)
    translation = np.asarray(ref_centroid, dtype=np.float64) - projection.rotation @ np.asarray(
        tmpl_centroid, dtype=np.float64
    )
    return Decoded(
        affine=affine,
        rotation=projection.rotation,
        translation=translation,
        degenerate=projection.degenerate,
        energy=solution.energy,
        singular_values=projection.singular_values,
    )
