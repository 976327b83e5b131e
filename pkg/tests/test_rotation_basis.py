import numpy as np
import pytest
from exceptions import DimensionMismatchException, LengthMismatchException
from registration.rotation_basis import WEIGHTS, assemble, build_basis, build_basis_2d, build_basis_3d


def test_basis_sizes():
    assert build_basis_2d().size == 20
    assert len(build_basis_3d()) == 80
    assert build_basis(2).matrices.shape == (20, 2, 2)
    assert build_basis(3).matrices.shape == (80, 3, 3)


def test_unsupported_dimension():
    with pytest.raises(DimensionMismatchException):
        build_basis(4)


def test_labels_follow_weight_major_order():
    labels = build_basis_2d().labels
    assert labels[:4] == ["0.5*I", "0.5*M", "-0.5*I", "-0.5*M"]
    assert labels[-1] == "-0.05*M"
    labels_3d = build_basis_3d().labels
    assert labels_3d[3] == "-0.5*M_a"
    assert labels_3d[15] == "-0.5*D_bc"


def test_repeated_weight_gives_identical_elements():
    matrices = build_basis_2d().matrices
    np.testing.assert_array_equal(matrices[8:12], matrices[12:16])
    matrices_3d = build_basis_3d().matrices
    np.testing.assert_array_equal(matrices_3d[32:48], matrices_3d[48:64])


def test_constructions_are_identical():
    np.testing.assert_array_equal(build_basis(2).matrices, build_basis(2).matrices)
    assert build_basis(3).labels == build_basis(3).labels


def test_positive_identity_bits_give_095_identity():
    bits = np.zeros(20, dtype=np.int8)
    bits[[0, 4, 8, 12, 16]] = 1
    np.testing.assert_allclose(assemble(build_basis_2d(), bits), 0.95 * np.eye(2), atol=1e-15)
    assert sum(WEIGHTS) == pytest.approx(0.95)


def test_all_zero_bits_give_zero_matrix():
    np.testing.assert_array_equal(assemble(build_basis_3d(), np.zeros(80)), np.zeros((3, 3)))


def test_2d_assembled_matrix_is_scaled_rotation_form():
    rng = np.random.default_rng(4)
    basis = build_basis_2d()
    for _ in range(50):
        A = assemble(basis, rng.integers(0, 2, basis.size))
        assert A[0, 0] == pytest.approx(A[1, 1], abs=1e-15)
        assert A[0, 1] == pytest.approx(-A[1, 0], abs=1e-15)


def test_3d_decomposition_by_family():
    rng = np.random.default_rng(7)
    basis = build_basis_3d()
    families = np.array(basis.families)
    for _ in range(50):
        bits = rng.integers(0, 2, basis.size)
        A = assemble(basis, bits)
        skew = assemble(basis, bits * (families == "skew"))
        symmetric = assemble(basis, bits * (families == "sym"))
        diagonal = assemble(basis, bits * np.isin(families, ["I", "diag"]))
        np.testing.assert_allclose(0.5 * (A - A.T), skew, atol=1e-14)
        np.testing.assert_allclose(A, diagonal + skew + symmetric, atol=1e-14)
        np.testing.assert_array_equal(np.diag(symmetric), np.zeros(3))
        np.testing.assert_array_equal(diagonal, np.diag(np.diag(diagonal)))


def test_assemble_rejects_wrong_length():
    with pytest.raises(LengthMismatchException):
        assemble(build_basis_2d(), np.ones(21))


def test_elements_are_read_only():
    with pytest.raises(ValueError):
        build_basis_2d().elements[0].matrix[0, 0] = 2.0
