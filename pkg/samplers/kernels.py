"""numba kernels shared by the samplers.

Bit order: free bit i sits at position (B - 1 - i) of a state index, so integer
order is lexicographic order with free bit 0 most significant.
"""
import numba as nb
import numpy as np

# steps between exact recomputations of the running energy
GRAY_RESYNC_INTERVAL = 1024


@nb.njit(cache=True)
def local_fields(Q: np.ndarray, x: np.ndarray) -> np.ndarray:
    """f_i = Σ_{j≠i} Q_ij x_j"""
    n = Q.shape[0]
    field = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for j in range(n):
            if j != i and x[j]:
                acc += Q[i, j]
        field[i] = acc
    return field


@nb.njit(cache=True)
def energy_of(Q: np.ndarray, linear: np.ndarray, constant: float, x: np.ndarray) -> float:
    n = Q.shape[0]
    energy = constant
    for i in range(n):
        if x[i]:
            energy += linear[i]
            for j in range(n):
                if x[j]:
                    energy += Q[i, j]
    return energy


@nb.njit(cache=True)
def flip_delta(Q: np.ndarray, linear: np.ndarray, x: np.ndarray, field: np.ndarray, i: int) -> float:
    """Energy change of flipping bit i, O(1) given the local fields."""
    sign = 1.0 - 2.0 * x[i]
    return sign * (Q[i, i] + linear[i] + 2.0 * field[i])


@nb.njit(cache=True)
def apply_flip(Q: np.ndarray, x: np.ndarray, field: np.ndarray, i: int):
    """Flips bit i and updates the local fields in O(B)."""
    sign = 1.0 - 2.0 * x[i]
    x[i] = 1 - x[i]
    for j in range(Q.shape[0]):
        if j != i:
            field[j] += sign * Q[j, i]


@nb.njit(cache=True)
def state_bits(state: int, n: int) -> np.ndarray:
    x = np.zeros(n, dtype=np.int8)
    for i in range(n):
        x[i] = (state >> (n - 1 - i)) & 1
    return x


@nb.njit(cache=True)
def gray_code_energies(Q: np.ndarray, linear: np.ndarray, constant: float) -> np.ndarray:
    """Energy of every state, enumerated in Gray-code order with incremental deltas."""
    n = Q.shape[0]
    total = 1 << n
    energies = np.empty(total)
    x = np.zeros(n, dtype=np.int8)
    field = np.zeros(n)
    energy = constant
    state = 0
    energies[0] = energy
    for k in range(1, total):
        position = 0
        while not (k >> position) & 1:
            position += 1
        i = n - 1 - position
        energy += flip_delta(Q, linear, x, field, i)
        apply_flip(Q, x, field, i)
        state ^= 1 << position
        if k % GRAY_RESYNC_INTERVAL == 0:
            field = local_fields(Q, x)
            energy = energy_of(Q, linear, constant, x)
        energies[state] = energy
    return energies


@nb.njit(cache=True)
def anneal_chain(
    Q: np.ndarray,
    linear: np.ndarray,
    constant: float,
    sweeps: int,
    t_start: float,
    t_end: float,
    seed: int,
):
    """One single-bit-flip Metropolis chain with geometric cooling.

    Returns the best visited state plus every best-so-far improvement as
    (step, energy, bits) events.
    """
    np.random.seed(seed)
    n = Q.shape[0]
    x = np.zeros(n, dtype=np.int8)
    for i in range(n):
        x[i] = 1 if np.random.random() < 0.5 else 0
    field = local_fields(Q, x)
    energy = energy_of(Q, linear, constant, x)

    capacity = 64
    event_steps = np.empty(capacity, dtype=np.int64)
    event_energies = np.empty(capacity)
    event_bits = np.empty((capacity, n), dtype=np.int8)
    event_steps[0] = 0
    event_energies[0] = energy
    event_bits[0] = x
    count = 1
    best_energy = energy
    best = x.copy()

    ratio = t_end / t_start
    for sweep in range(sweeps):
        if sweeps > 1:
            temperature = t_start * ratio ** (sweep / (sweeps - 1))
        else:
            temperature = t_start
        for i in range(n):
            delta = flip_delta(Q, linear, x, field, i)
            if delta <= 0.0 or np.random.random() < np.exp(-delta / temperature):
                apply_flip(Q, x, field, i)
                energy += delta
                if energy < best_energy:
                    best_energy = energy
                    best[:] = x
                    if count == capacity:
                        capacity *= 2
                        grown_steps = np.empty(capacity, dtype=np.int64)
                        grown_energies = np.empty(capacity)
                        grown_bits = np.empty((capacity, n), dtype=np.int8)
                        grown_steps[:count] = event_steps[:count]
                        grown_energies[:count] = event_energies[:count]
                        grown_bits[:count] = event_bits[:count]
                        event_steps = grown_steps
                        event_energies = grown_energies
                        event_bits = grown_bits
                    event_steps[count] = sweep * n + i + 1
                    event_energies[count] = energy
                    event_bits[count] = x
                    count += 1
        # resync once per sweep
        field = local_fields(Q, x)
        energy = energy_of(Q, linear, constant, x)

    return best, best_energy, event_steps[:count], event_energies[:count], event_bits[:count]
