import numpy as np
import pytest
from conftest import random_centered
from exceptions import CardinalityMismatchException, ZeroReferenceException
from registration.geometry import LinkSet, PointSet, RigidTransform, knn_links, rotation_2d
from registration.metrics import (
    alignment_error,
    discrepancy_from_eigenvalues,
    evaluate,
    gpe,
    residual_energy,
    transformation_discrepancy,
)


@pytest.fixture
def points() -> PointSet:
    return random_centered(np.random.default_rng(0), 10, 2)


def test_alignment_error_examples(points):
    assert alignment_error(np.eye(2), points, points) == 0.0
    assert alignment_error(np.zeros((2, 2)), points, points) == pytest.approx(1.0)
    assert alignment_error(0.95 * np.eye(2), points, points) == pytest.approx(0.05)


def test_alignment_error_undoes_the_rotation(points):
    rotation = rotation_2d(1.1).rotation
    template = PointSet(points.points @ rotation)
    assert alignment_error(rotation, points, template) == pytest.approx(0.0, abs=1e-12)
    assert alignment_error(np.eye(2), points, template) > 0.5


def test_alignment_error_is_scale_free(points):
    R = np.array([[0.8, -0.3], [0.3, 0.8]])
    scaled = PointSet(3.0 * points.points)
    assert alignment_error(R, scaled, scaled) == pytest.approx(alignment_error(R, points, points))


def test_alignment_error_errors(points):
    with pytest.raises(CardinalityMismatchException):
        alignment_error(np.eye(2), points, PointSet(points.points[:5]))
    zero = PointSet(np.zeros((3, 2)))
    with pytest.raises(ZeroReferenceException):
        alignment_error(np.eye(2), zero, zero)


def test_transformation_discrepancy_examples():
    assert transformation_discrepancy(np.eye(3)) == 0.0
    assert transformation_discrepancy(rotation_2d(0.4).rotation) == pytest.approx(0.0, abs=1e-15)
    assert transformation_discrepancy(np.zeros((2, 2))) == pytest.approx(np.sqrt(2.0))
    assert transformation_discrepancy(0.95 * np.eye(2)) == pytest.approx(0.0975 * np.sqrt(2.0))


def test_discrepancy_paths_agree():
    rng = np.random.default_rng(1)
    for _ in range(100):
        R = rng.standard_normal((3, 3))
        assert discrepancy_from_eigenvalues(R) == pytest.approx(transformation_discrepancy(R), rel=1e-9)


def test_gpe_single_pair():
    one = PointSet(np.array([[0.0, 0.0]]))
    other = PointSet(np.array([[1.0, 0.0]]))
    assert gpe(RigidTransform.identity(2), one, other) == pytest.approx(1.0)


def test_gpe_sums_unsquared_distances_over_all_pairs():
    reference = PointSet(np.array([[0.0, 0.0], [3.0, 0.0]]))
    template = PointSet(np.array([[0.0, 1.0]]))
    assert gpe(RigidTransform.identity(2), reference, template) == pytest.approx(1.0 + np.sqrt(10.0))
    weighted = gpe(
        RigidTransform.identity(2),
        reference,
        template,
        reference_masses=np.array([1.0, 3.0]),
        template_masses=np.array([2.0]),
    )
    assert weighted == pytest.approx(2.0 * (1.0 + 3.0 * np.sqrt(10.0)))


def test_gpe_applies_the_transform():
    reference = PointSet(np.array([[1.0, 1.0]]))
    template = PointSet(np.array([[0.0, 0.0]]))
    moved = RigidTransform(np.eye(2), np.array([1.0, 1.0]))
    assert gpe(moved, reference, template) == pytest.approx(0.0)


def test_residual_energy_scales_quadratically(points):
    R = np.array([[0.5, -0.25], [0.25, 0.5]])
    links = knn_links(points, points, 3)
    doubled = PointSet(2.0 * points.points)
    assert residual_energy(R, doubled, doubled, links) == pytest.approx(4.0 * residual_energy(R, points, points, links))


def test_residual_energy_of_zero_transform_is_reference_energy(points):
    expected = 4.0 * np.sum(points.points**2)
    links = knn_links(points, points, 4)
    assert residual_energy(np.zeros((2, 2)), points, points, links) == pytest.approx(expected)


def test_evaluate_reports_every_metric(points):
    R = 0.95 * np.eye(2)
    report = evaluate(
        R, points, points, LinkSet.identity(points.size), qubo_energy=1.25, ground_truth=points
    )
    assert report.e2d == pytest.approx(0.05)
    assert report.eR == pytest.approx(0.0975 * np.sqrt(2.0))
    assert report.qubo_energy == 1.25
    assert report.residual_energy == pytest.approx(0.0025 * np.sum(points.points**2))
    assert report.gpe > 0.0
    assert set(report.to_dict()) == {"e2d", "eR", "gpe", "qubo_energy", "residual_energy"}


def test_evaluate_without_correspondences(points):
    larger = random_centered(np.random.default_rng(3), 14, 2)
    report = evaluate(np.eye(2), points, larger, knn_links(points, larger, 2), qubo_energy=0.0)
    assert report.e2d is None


def test_evaluate_scores_against_ground_truth(points):
    noisy = PointSet(np.vstack([points.points, [[5.0, 5.0]]]))
    report = evaluate(
        np.eye(2), points, noisy, knn_links(points, noisy, 1), qubo_energy=0.0, ground_truth=points
    )
    assert report.e2d == 0.0


def test_evaluate_needs_ground_truth_for_equal_sizes(points):
    report = evaluate(np.eye(2), points, points, knn_links(points, points, 1), qubo_energy=0.0)
    assert report.e2d is None
