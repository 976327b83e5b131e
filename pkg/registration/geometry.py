import math
from dataclasses import dataclass, field
import numpy as np
from scipy.spatial.distance import cdist
from scipy.spatial.transform import Rotation
from exceptions import (
    DimensionMismatchException,
    InvalidLinkDegreeException,
    InvalidNoiseRatioException,
    PointSetFormatException,
)

SUPPORTED_DIMS = (2, 3)
SYNTHETIC_PREFIX = "synthetic:"
SYNTHETIC_KINDS = ("ring", "circle", "grid", "blobs", "spiral")


@dataclass(frozen=True)
class PointSet:
    """N points in R^D, stored row-wise as an (N, D) float array.

    The math (and the QUBO layout) talks about the D×N matrix [x_1 ... x_N];
    use `matrix` for that view.
    """

    points: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=np.float64)
        if points.ndim != 2 or points.shape[0] < 1:
            raise PointSetFormatException("A point set needs at least one point.")
        if points.shape[1] not in SUPPORTED_DIMS:
            raise PointSetFormatException(
                f"Points must be 2D or 3D, got dimension {points.shape[1]}."
            )
        if not np.all(np.isfinite(points)):
            raise PointSetFormatException("Point coordinates must be finite.")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return self.points.T

    @property
    def centroid(self) -> np.ndarray:
        return self.points.mean(axis=0)

    def __len__(self):
        return self.size


@dataclass(frozen=True)
class LinkSet:
    """For every reference point n, the ordered template indices it interacts with (0-based)."""

    links: tuple[np.ndarray, ...]
    template_size: int = field(default=0)

    def __post_init__(self):
        frozen = []
        for n, row in enumerate(self.links):
            row = np.array(row, dtype=np.int64).reshape(-1)
            if row.size < 1:
                raise InvalidLinkDegreeException(f"Reference point {n} has no links.")
            if np.any(row < 0) or (self.template_size and np.any(row >= self.template_size)):
                raise InvalidLinkDegreeException(
                    f"Reference point {n} links to an index outside the template."
                )
            if np.unique(row).size != row.size:
                raise InvalidLinkDegreeException(
                    f"Reference point {n} links to the same template point twice."
                )
            row.setflags(write=False)
            frozen.append(row)
        object.__setattr__(self, "links", tuple(frozen))

    @staticmethod
    def identity(n: int) -> "LinkSet":
        """Index correspondences x_n <-> y_n, the transformation-estimation case."""
        return LinkSet(tuple(np.array([i]) for i in range(n)), template_size=n)

    @property
    def degrees(self) -> np.ndarray:
        return np.array([row.size for row in self.links], dtype=np.int64)

    @property
    def total(self) -> int:
        return int(self.degrees.sum())

    @property
    def mean_link_degree(self) -> float:
        return self.total / len(self.links)

    def pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """Flattened (reference index, template index) pairs in block order."""
        reference = np.repeat(np.arange(len(self.links)), self.degrees)
        template = np.concatenate(self.links)
        return reference, template

    def __len__(self):
        return len(self.links)


@dataclass(frozen=True)
class RigidTransform:
    rotation: np.ndarray
    translation: np.ndarray

    @staticmethod
    def identity(dim: int) -> "RigidTransform":
        return RigidTransform(np.eye(dim), np.zeros(dim))

    @property
    def dim(self) -> int:
        return self.rotation.shape[0]


# ──────────────────────────────── I/O ──────────────────────────────── #


def load_point_set(path: str) -> PointSet:
    """Reads whitespace-separated points, one per line. `#` lines and blank lines are skipped."""
    rows: list[list[float]] = []
    dim = None
    with open(path, "r", encoding="UTF-8") as stream:
        for line_number, line in enumerate(stream, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            tokens = stripped.split()
            if dim is None:
                dim = len(tokens)
                if dim not in SUPPORTED_DIMS:
                    raise PointSetFormatException(
                        f"{path}:{line_number}: expected 2 or 3 coordinates, got {dim}"
                    )
            elif len(tokens) != dim:
                raise PointSetFormatException(
                    f"{path}:{line_number}: ragged row with {len(tokens)} coordinates, expected {dim}"
                )
            try:
                rows.append([float(token) for token in tokens])
            except ValueError as e:
                raise PointSetFormatException(f"{path}:{line_number}: {e}") from e

    if not rows:
        raise PointSetFormatException(f"{path}: no points found")
    return PointSet(np.array(rows))


def save_point_set(point_set: PointSet, path: str):
    with open(path, "w", encoding="UTF-8") as stream:
        for point in point_set.points:
            stream.write(" ".join(f"{value:.17g}" for value in point) + "\n")


def synthetic_point_set(kind: str, n: int = 91, seed: int = 0) -> PointSet:
    """Bundled 2D shapes for self-contained runs."""
    rng = np.random.default_rng(seed)
    if kind == "ring":
        phi = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        radius = 1.0 + 0.1 * rng.standard_normal(n)
        points = np.column_stack((radius * np.cos(phi), radius * np.sin(phi)))
    elif kind == "circle":
        # evenly spaced unit circle; its kNN shrinkage grows strictly with k
        phi = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        points = np.column_stack((np.cos(phi), np.sin(phi)))
    elif kind == "grid":
        side = math.ceil(math.sqrt(n))
        xs, ys = np.meshgrid(np.arange(side), np.arange(side), indexing="xy")
        points = np.column_stack((xs.ravel(), ys.ravel()))[:n] / max(side - 1, 1)
    elif kind == "blobs":
        centers = np.array([[-1.0, 0.0], [1.0, 0.4], [0.2, 1.3]])
        labels = np.arange(n) % len(centers)
        points = centers[labels] + 0.25 * rng.standard_normal((n, 2))
    elif kind == "spiral":
        t = np.linspace(0.0, 1.0, n)
        radius = 0.2 + t
        phi = 3.0 * math.pi * t
        points = np.column_stack((radius * np.cos(phi), 0.6 * radius * np.sin(phi)))
    else:
        raise PointSetFormatException(
            f"Unknown synthetic dataset '{kind}', choose one of {', '.join(SYNTHETIC_KINDS)}"
        )
    return PointSet(points)


def resolve_dataset(source: str, seed: int = 0) -> PointSet:
    """`synthetic:<kind>[:n]` or a path to a point-set file."""
    if source.startswith(SYNTHETIC_PREFIX):
        parts = source[len(SYNTHETIC_PREFIX):].split(":")
        try:
            n = int(parts[1]) if len(parts) > 1 else 91
        except ValueError as e:
            raise PointSetFormatException(f"Invalid point count in '{source}'") from e
        return synthetic_point_set(parts[0], n, seed)
    return load_point_set(source)


# ──────────────────────────────── operations ──────────────────────────────── #


def center(point_set: PointSet) -> tuple[PointSet, np.ndarray]:
    centroid = point_set.centroid
    return PointSet(point_set.points - centroid), centroid


def apply_transform(point_set: PointSet, transform: RigidTransform) -> PointSet:
    """y -> R y + t for every point."""
    return PointSet(point_set.points @ transform.rotation.T + transform.translation)


def knn_links(reference: PointSet, template: PointSet, k: int) -> LinkSet:
    """The k nearest template points of every reference point, by brute-force distance scan.

    Ties are broken by the smaller template index (stable sort).
    """
    if reference.dim != template.dim:
        raise DimensionMismatchException(
            f"Reference is {reference.dim}D but template is {template.dim}D"
        )
    if k < 1 or k > template.size:
        raise InvalidLinkDegreeException(
            f"k must be in [1, {template.size}], got {k}"
        )
    distances = cdist(reference.points, template.points)
    order = np.argsort(distances, axis=1, kind="stable")[:, :k]
    return LinkSet(tuple(order), template_size=template.size)


def add_uniform_outliers(template: PointSet, ratio: float, seed: int) -> PointSet:
    """Appends floor(ratio * M) points drawn uniformly from the template's bounding box."""
    if not 0.0 <= ratio <= 0.5:
        raise InvalidNoiseRatioException(f"Noise ratio must be in [0, 0.5], got {ratio}")
    count = int(math.floor(ratio * template.size + 1e-9))
    if count == 0:
        return template
    rng = np.random.default_rng(seed)
    low = template.points.min(axis=0)
    high = template.points.max(axis=0)
    outliers = rng.uniform(low, high, size=(count, template.dim))
    return PointSet(np.vstack((template.points, outliers)))


def rotation_2d(theta: float) -> RigidTransform:
    c, s = math.cos(theta), math.sin(theta)
    return RigidTransform(np.array([[c, -s], [s, c]]), np.zeros(2))


def random_rotation(dim: int, seed: int) -> RigidTransform:
    """2D: uniform angle. 3D: uniform over SO(3)."""
    if dim not in SUPPORTED_DIMS:
        raise DimensionMismatchException(f"Rotations are 2D or 3D, got {dim}")
    rng = np.random.default_rng(seed)
    if dim == 2:
        return rotation_2d(rng.uniform(0.0, 2.0 * math.pi))

    rotation = Rotation.random(random_state=rng).as_matrix()
    return RigidTransform(rotation, np.zeros(3))
