import numpy as np
import pytest
from conftest import random_reduced
from exceptions import (
    DegenerateGapException,
    DimensionMismatchException,
    InvalidConfigException,
    InvalidScheduleException,
    IsingFormatException,
    TooManyQubitsException,
)
from quantum.annealing_simulator import (
    MAX_EVOLUTION_QUBITS,
    GapCurve,
    annealing_rate_bound,
    evolve,
    gap_curve,
    ground_indices,
    schedule_grid,
)
from quantum.hamiltonians import (
    build_hi,
    build_hp,
    check_qubits,
    hadamard_state,
    interpolate,
    load_ising,
    register_to_qubo_bits,
    save_ising,
)
from registration.qubo_builder import IsingProblem, reduced_energy, to_ising
from samplers.exhaustive_sampler import solve_exhaustive


@pytest.fixture
def three_qubits() -> IsingProblem:
    return IsingProblem(h=np.array([1.0, 0.7, -0.5]), J={(0, 1): 0.2, (1, 2): 0.15})


@pytest.fixture
def single_qubit() -> IsingProblem:
    return IsingProblem(h=np.array([1.0]))


def test_transverse_field_hamiltonian():
    np.testing.assert_array_equal(build_hi(1).matrix, [[0.0, -1.0], [-1.0, 0.0]])
    energies = np.linalg.eigvalsh(build_hi(3, bx=2.0).matrix)
    assert energies[0] == pytest.approx(-6.0)
    assert energies[1] > energies[0] + 1.0
    with pytest.raises(InvalidConfigException):
        build_hi(2, bx=0.0)


def test_problem_hamiltonian_is_diagonal(three_qubits):
    hp = build_hp(three_qubits)
    np.testing.assert_array_equal(hp.matrix, np.diag(np.diag(hp.matrix)))
    # all spins up
    assert hp.matrix[0, 0] == pytest.approx(1.0 + 0.7 - 0.5 + 0.2 + 0.15)
    # register 011 is spins (+1, -1, -1)
    assert hp.matrix[3, 3] == pytest.approx(1.0 - 0.7 + 0.5 - 0.2 + 0.15)


def test_register_states_map_back_to_qubo_energies():
    reduced = random_reduced(np.random.default_rng(0), 5)
    ising = to_ising(reduced)
    diagonal = np.diag(build_hp(ising).matrix)
    for index in range(1 << 5):
        bits = register_to_qubo_bits(index, 5)
        assert diagonal[index] + ising.offset == pytest.approx(reduced_energy(reduced, bits), abs=1e-9)

    ground, _ = solve_exhaustive(reduced)
    lowest = int(np.argmin(diagonal))
    np.testing.assert_array_equal(register_to_qubo_bits(lowest, 5), ground.free_bits)


def test_register_to_qubo_bits_flips_register_bits():
    np.testing.assert_array_equal(register_to_qubo_bits(0, 3), [1, 1, 1])
    np.testing.assert_array_equal(register_to_qubo_bits(6, 3), [0, 0, 1])


def test_hadamard_state_is_uniform():
    state = hadamard_state(4)
    np.testing.assert_allclose(state.probabilities, np.full(16, 1.0 / 16.0))
    ground = np.linalg.eigh(build_hi(4).matrix)[1][:, 0]
    assert abs(np.vdot(ground, state.amplitudes)) == pytest.approx(1.0)


def test_qubit_limits():
    check_qubits(12)
    with pytest.raises(TooManyQubitsException):
        check_qubits(13)
    with pytest.raises(TooManyQubitsException):
        check_qubits(0)
    with pytest.raises(TooManyQubitsException):
        check_qubits(MAX_EVOLUTION_QUBITS + 1, MAX_EVOLUTION_QUBITS)
    with pytest.raises(TooManyQubitsException):
        build_hi(13)


def test_interpolate_endpoints(three_qubits):
    hi, hp = build_hi(3), build_hp(three_qubits)
    assert interpolate(hi, hp, 0.0) is hi
    assert interpolate(hi, hp, 1.0) is hp
    np.testing.assert_allclose(interpolate(hi, hp, 0.25).matrix, 0.75 * hi.matrix + 0.25 * hp.matrix)
    with pytest.raises(DimensionMismatchException):
        interpolate(build_hi(2), hp, 0.5)


def test_single_qubit_gap_curve(single_qubit):
    curve = gap_curve(build_hi(1), build_hp(single_qubit), 11)
    expected = 2.0 * np.sqrt((1.0 - curve.s) ** 2 + curve.s**2)
    np.testing.assert_allclose(curve.gaps, expected, atol=1e-12)
    assert curve.argmin_s == pytest.approx(0.5)
    assert curve.min_gap == pytest.approx(np.sqrt(2.0))
    assert curve.ground_energies[0] == pytest.approx(-1.0)
    assert len(curve.rows()) == 11


def test_single_qubit_rate_bound(single_qubit):
    bound = annealing_rate_bound(build_hi(1), build_hp(single_qubit), 101)
    assert bound == pytest.approx(1.0 / (4.0 * 0.5**1.5), rel=1e-9)


def test_rate_bound_rejects_degenerate_ground_state():
    with pytest.raises(DegenerateGapException) as raised:
        annealing_rate_bound(build_hi(1), build_hp(IsingProblem(h=np.array([0.0]))), 5)
    assert raised.value.s == 1.0


def test_schedule_grid():
    np.testing.assert_array_equal(schedule_grid(3), [0.0, 0.5, 1.0])
    with pytest.raises(InvalidScheduleException):
        schedule_grid(1)
    with pytest.raises(ValueError):
        GapCurve(np.array([0.0, 0.0]), np.ones(2), np.zeros(2))


def test_ground_indices_lists_degenerate_states():
    hp = build_hp(IsingProblem(h=np.array([1.0, 0.0])))
    np.testing.assert_array_equal(ground_indices(hp), [2, 3])


def test_evolution_with_zero_time_keeps_the_initial_state(three_qubits):
    state, overlap = evolve(build_hi(3), build_hp(three_qubits), total_time=0.0, steps=100)
    np.testing.assert_allclose(state.probabilities, np.full(8, 1.0 / 8.0))
    assert overlap == pytest.approx(1.0 / 8.0)


def test_slow_evolution_reaches_the_ground_state(three_qubits):
    hi, hp = build_hi(3), build_hp(three_qubits)
    bound = annealing_rate_bound(hi, hp, 101)
    state, overlap = evolve(hi, hp, total_time=50.0 * bound, steps=1000)
    assert overlap >= 0.9
    assert int(np.argmax(state.probabilities)) == int(ground_indices(hp)[0])


def test_longer_evolution_is_more_adiabatic():
    hi = build_hi(2)
    hp = build_hp(IsingProblem(h=np.array([1.0, 0.7]), J={(0, 1): 0.2}))
    _, fast = evolve(hi, hp, total_time=1.0, steps=2000)
    _, slow = evolve(hi, hp, total_time=100.0, steps=2000)
    assert slow >= 0.99
    assert slow > fast


def test_evolution_rejects_bad_schedules(three_qubits):
    hi, hp = build_hi(3), build_hp(three_qubits)
    with pytest.raises(InvalidScheduleException):
        evolve(hi, hp, total_time=1.0, steps=10)
    with pytest.raises(InvalidScheduleException):
        evolve(hi, hp, total_time=-1.0, steps=100)


def test_save_and_load_ising(tmp_path, three_qubits):
    file = tmp_path / "problem.ising"
    save_ising(IsingProblem(h=three_qubits.h, J=three_qubits.J, offset=2.5), str(file))
    loaded = load_ising(str(file))
    np.testing.assert_array_equal(loaded.h, three_qubits.h)
    assert loaded.J == three_qubits.J
    assert loaded.offset == 0.0


def test_load_ising_accumulates_and_orders_couplings(tmp_path):
    file = tmp_path / "problem.ising"
    file.write_text("# comment\nJ 2 0 0.5\nJ 0 2 0.25\n\nh 1 -1\n", encoding="UTF-8")
    loaded = load_ising(str(file))
    np.testing.assert_array_equal(loaded.h, [0.0, -1.0, 0.0])
    assert loaded.J == {(0, 2): 0.75}


@pytest.mark.parametrize(
    "content",
    ["J 1 1 0.5\n", "h -1 0.5\n", "x 1 2\n", "h 0\n", "h zero 1\n", "# empty\n"],
)
def test_load_ising_rejects_malformed_files(tmp_path, content):
    file = tmp_path / "problem.ising"
    file.write_text(content, encoding="UTF-8")
    with pytest.raises(IsingFormatException):
        load_ising(str(file))


def test_gap_at_the_end_matches_the_exhaustive_spectrum():
    reduced = random_reduced(np.random.default_rng(12), 4)
    _, spectrum = solve_exhaustive(reduced)
    curve = gap_curve(build_hi(4), build_hp(to_ising(reduced)), 21)
    assert curve.gaps[-1] == pytest.approx(spectrum.gap, abs=1e-9)


def test_identical_hamiltonians_have_a_constant_gap_and_no_bound():
    hi = build_hi(2)
    curve = gap_curve(hi, hi, 11)
    np.testing.assert_allclose(curve.gaps, np.full(11, 2.0), atol=1e-12)
    assert annealing_rate_bound(hi, hi, 11) == 0.0


def test_rate_bound_grows_as_the_gap_closes():
    hi = build_hi(1)
    wide = annealing_rate_bound(hi, build_hp(IsingProblem(h=np.array([1.0]))), 101)
    narrow = annealing_rate_bound(hi, build_hp(IsingProblem(h=np.array([0.1]))), 101)
    assert narrow > wide


def test_overlap_grows_with_the_anneal_time(three_qubits):
    hi, hp = build_hi(3), build_hp(three_qubits)
    overlaps = [evolve(hi, hp, total_time=T, steps=2000)[1] for T in (1.0, 10.0, 100.0)]
    assert all(b >= a - 1e-6 for a, b in zip(overlaps, overlaps[1:]))
    assert overlaps[-1] >= 0.99
