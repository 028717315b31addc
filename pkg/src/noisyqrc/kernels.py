"""Local tensor-contraction kernels on raw numpy arrays.

All routines act on a single target qubit (or a qubit pair for the
permutation kernel) without materialising 2^n x 2^n operators. Arrays may
carry leading batch axes: state vectors are ``(..., D)`` and density
matrices ``(..., D, D)`` with ``D = 2**n``. Qubit 0 is the most significant
bit of the basis index.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


def _is_diagonal(m: np.ndarray) -> bool:
    return m[0, 1] == 0 and m[1, 0] == 0


def _left_multiply(view: np.ndarray, m: np.ndarray) -> np.ndarray:
    # view has shape (..., outer, 2, inner); contracts m with the size-2 axis
    out = np.empty_like(view)
    if _is_diagonal(m):
        np.multiply(view[..., 0, :], m[0, 0], out=out[..., 0, :])
        np.multiply(view[..., 1, :], m[1, 1], out=out[..., 1, :])
        return out
    a, b = view[..., 0, :], view[..., 1, :]
    out[..., 0, :] = m[0, 0] * a + m[0, 1] * b
    out[..., 1, :] = m[1, 0] * a + m[1, 1] * b
    return out


def apply_1q_vector(psi: np.ndarray, u: np.ndarray, qubit: int, n: int) -> np.ndarray:
    lead = psi.shape[:-1]
    view = psi.reshape(lead + (2**qubit, 2, 2 ** (n - qubit - 1)))
    return _left_multiply(view, u).reshape(psi.shape)


def apply_1q_density(rho: np.ndarray, u: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Return u rho u^dagger with u acting on ``qubit``."""
    dim = 2**n
    lead = rho.shape[:-2]
    hi, lo = 2**qubit, 2 ** (n - qubit - 1)
    rows = rho.reshape(lead + (hi, 2, lo * dim))
    out = _left_multiply(rows, u)
    cols = out.reshape(lead + (dim * hi, 2, lo))
    out = _left_multiply(cols, u.conj())
    return out.reshape(rho.shape)


def superoperator(kraus_ops) -> np.ndarray:
    """4x4 matrix S with S[(a,b),(c,d)] = sum_m M[a,c] conj(M[b,d])."""
    return sum(np.kron(m, m.conj()) for m in kraus_ops)


def apply_superop_density(rho: np.ndarray, sop: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Apply a single-qubit channel given by its superoperator to ``qubit``.

    The density matrix is split into four blocks by the row and column bit
    of the target qubit; each output block is a sparse linear combination of
    the input blocks.
    """
    lead = rho.shape[:-2]
    hi, lo = 2**qubit, 2 ** (n - qubit - 1)
    view = rho.reshape(lead + (hi, 2, lo, hi, 2, lo))
    out = np.empty_like(view)
    blocks = [[view[..., :, c, :, :, d, :] for d in (0, 1)] for c in (0, 1)]
    for a in (0, 1):
        for b in (0, 1):
            row = sop[2 * a + b]
            acc = None
            for c in (0, 1):
                for d in (0, 1):
                    coef = row[2 * c + d]
                    if coef == 0:
                        continue
                    term = blocks[c][d] if coef == 1 else coef * blocks[c][d]
                    acc = term if acc is None else acc + term
            target = out[..., :, a, :, :, b, :]
            if acc is None:
                target[...] = 0
            else:
                target[...] = acc
    return out.reshape(rho.shape)


@lru_cache(maxsize=256)
def cnot_permutation(n: int, control: int, target: int) -> np.ndarray:
    idx = np.arange(2**n)
    cbit = (idx >> (n - 1 - control)) & 1
    perm = idx ^ (cbit << (n - 1 - target))
    perm.flags.writeable = False
    return perm


def apply_perm_vector(psi: np.ndarray, perm: np.ndarray) -> np.ndarray:
    return np.take(psi, perm, axis=-1)


def apply_perm_density(rho: np.ndarray, perm: np.ndarray) -> np.ndarray:
    # perm is an involution, so P rho P^T = rho[perm][:, perm]
    return np.take(np.take(rho, perm, axis=-2), perm, axis=-1)


try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

HAVE_NUMBA = numba is not None


def block_superop(u: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> u rho u^dagger in the same layout as :func:`superoperator`."""
    return np.kron(u, u.conj())


if HAVE_NUMBA:

    @numba.njit(cache=True, nogil=True)
    def _superop_inplace(rho, sop, qubit, n):  # pragma: no cover - jitted
        dim = 1 << n
        bit = 1 << (n - 1 - qubit)
        v = np.empty(4, dtype=np.complex128)
        for i in range(dim):
            if i & bit:
                continue
            i1 = i | bit
            for j in range(dim):
                if j & bit:
                    continue
                j1 = j | bit
                v[0] = rho[i, j]
                v[1] = rho[i, j1]
                v[2] = rho[i1, j]
                v[3] = rho[i1, j1]
                rho[i, j] = sop[0, 0] * v[0] + sop[0, 1] * v[1] + sop[0, 2] * v[2] + sop[0, 3] * v[3]
                rho[i, j1] = sop[1, 0] * v[0] + sop[1, 1] * v[1] + sop[1, 2] * v[2] + sop[1, 3] * v[3]
                rho[i1, j] = sop[2, 0] * v[0] + sop[2, 1] * v[1] + sop[2, 2] * v[2] + sop[2, 3] * v[3]
                rho[i1, j1] = sop[3, 0] * v[0] + sop[3, 1] * v[1] + sop[3, 2] * v[2] + sop[3, 3] * v[3]

    @numba.njit(cache=True, nogil=True)
    def _cnot_inplace(rho, control, target, n):  # pragma: no cover - jitted
        dim = 1 << n
        cbit = 1 << (n - 1 - control)
        tbit = 1 << (n - 1 - target)
        for i in range(dim):
            if (i & cbit) and not (i & tbit):
                i1 = i | tbit
                for j in range(dim):
                    tmp = rho[i, j]
                    rho[i, j] = rho[i1, j]
                    rho[i1, j] = tmp
        for i in range(dim):
            for j in range(dim):
                if (j & cbit) and not (j & tbit):
                    j1 = j | tbit
                    tmp = rho[i, j]
                    rho[i, j] = rho[i, j1]
                    rho[i, j1] = tmp

    def superop_inplace(rho: np.ndarray, sop: np.ndarray, qubit: int, n: int) -> None:
        """In-place fused block update of a single 2-D density matrix."""
        _superop_inplace(rho, np.ascontiguousarray(sop), qubit, n)

    def cnot_inplace(rho: np.ndarray, control: int, target: int, n: int) -> None:
        _cnot_inplace(rho, control, target, n)
