"""Pure numpy implementations of the hot kernels."""
import numpy as np

# low two bits of a basis index are (m_A, m_B); row of rho is 2*m_A + m_B
_KRON_ORDER = np.array([0, 2, 1, 3])


def spin_table(n):
    """(2**n, n) array of Ising spins s_i = 2*m_i - 1 for every packed index."""
    idx = np.arange(1 << n, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(n)) & 1
    return (2 * bits - 1).astype(np.float64)


def energy_table(J):
    n = J.shape[0]
    if n == 0:
        return np.zeros(1)
    S = spin_table(n)
    return 0.5 * np.einsum("ij,jk,ik->i", S, J, S)


def reduced_pair_series(c0, E, times, hbar, chunk=64):
    """rho_AB(t) for every t, shape (T, 4, 4), without storing evolved states."""
    c0 = np.asarray(c0, dtype=np.complex128)
    E = np.asarray(E, dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    out = np.empty((len(times), 4, 4), dtype=np.complex128)
    for s in range(0, len(times), chunk):
        t = times[s:s + chunk]
        amps = c0[None, :] * np.exp(-1j * np.outer(t, E) / hbar)
        M = amps.reshape(len(t), -1, 4)[:, :, _KRON_ORDER]
        out[s:s + chunk] = np.einsum("tpi,tpj->tij", M, M.conj())
    return out
