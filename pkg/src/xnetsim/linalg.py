"""Dense complex-matrix kernels and real-expansion operators.

Conventions used throughout the package:

* ``realify(M)`` maps an r x c complex matrix to the 2r x 2c real matrix
  obtained by replacing each entry ``x`` with the 2x2 block
  ``[[Re x, -Im x], [Im x, Re x]]``.
* ``tilde_vec(v)`` maps a length-n complex vector to the length-2n real
  vector ``[Re v1, Im v1, Re v2, Im v2, ...]`` (interleaved).
* ``vec(M)`` stacks columns, so ``vec(A B) = (B^T kron I) vec(A)``.

These three satisfy the commuting diagram
``tilde_vec(M @ v) == realify(M) @ tilde_vec(v)``, which is what lets a
complex linear system be handed to a real-valued lattice decoder.

All functions are deterministic and pure; every randomized caller passes
an explicit ``numpy.random.Generator``.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

from .errors import NotHermitian, NotUnitary, SingularMatrix

__all__ = [
    "invert",
    "fro_norm",
    "eig_hermitian",
    "numeric_rank",
    "kron",
    "realify",
    "tilde_vec",
    "untilde_vec",
    "vec",
    "unvec",
    "is_unitary",
    "require_unitary",
    "rand_unitary",
    "rand_complex_gaussian",
]

#: relative pivot threshold below which a matrix is declared singular
PIVOT_RTOL = 1e-12


def fro_norm(m) -> float:
    """Frobenius norm, sqrt of the sum of squared entry magnitudes."""
    return float(np.linalg.norm(np.asarray(m)))


def invert(m: np.ndarray) -> np.ndarray:
    """Invert a square complex matrix by LU with partial pivoting.

    Raises SingularMatrix when any pivot magnitude falls below
    ``1e-12 * ||m||_F``. That event has probability zero for continuous
    channel draws; callers treat it as a signal to redraw.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"invert needs a square matrix, got shape {m.shape}")
    with warnings.catch_warnings():
        # the pivot check below supersedes scipy's exact-zero warning
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(m, check_finite=True)
    pivots = np.abs(np.diag(lu))
    # <= so the all-zero matrix (norm 0) is still declared singular
    if np.any(pivots <= PIVOT_RTOL * fro_norm(m)):
        raise SingularMatrix(
            f"pivot {pivots.min():.3e} below {PIVOT_RTOL:.0e} * ||m||_F"
        )
    return scipy.linalg.lu_solve((lu, piv), np.eye(m.shape[0], dtype=m.dtype))


def eig_hermitian(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, u)`` with eigenvalues ``w`` real and sorted descending
    and ``u`` unitary, so ``m @ u == u @ diag(w)``.
    """
    m = np.asarray(m)
    nrm = fro_norm(m)
    if fro_norm(m - m.conj().T) > 1e-9 * max(nrm, 1e-300):
        raise NotHermitian("matrix is not Hermitian at 1e-9 relative tolerance")
    w, u = np.linalg.eigh(m)
    return w[::-1].copy(), u[:, ::-1].copy()


def numeric_rank(m: np.ndarray, tol: float = 1e-9) -> int:
    """Number of singular values above ``tol * s_max``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = np.linalg.svd(np.asarray(m), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product."""
    return np.kron(np.asarray(a), np.asarray(b))


def realify(m: np.ndarray) -> np.ndarray:
    """Expand complex r x c to real 2r x 2c with per-entry rotation blocks.

    Works on a batch too: input shape (..., r, c) gives (..., 2r, 2c).
    """
    m = np.asarray(m, dtype=np.complex128)
    *batch, r, c = m.shape
    out = np.empty((*batch, 2 * r, 2 * c), dtype=np.float64)
    re, im = m.real, m.imag
    out[..., 0::2, 0::2] = re
    out[..., 0::2, 1::2] = -im
    out[..., 1::2, 0::2] = im
    out[..., 1::2, 1::2] = re
    return out


def tilde_vec(v: np.ndarray) -> np.ndarray:
    """Interleave real and imaginary parts of a complex vector.

    Batched: shape (..., n) gives (..., 2n).
    """
    v = np.asarray(v, dtype=np.complex128)
    out = np.empty(v.shape[:-1] + (2 * v.shape[-1],), dtype=np.float64)
    out[..., 0::2] = v.real
    out[..., 1::2] = v.imag
    return out


def untilde_vec(r: np.ndarray) -> np.ndarray:
    """Inverse of tilde_vec."""
    r = np.asarray(r, dtype=np.float64)
    if r.shape[-1] % 2:
        raise ValueError("length must be even")
    return r[..., 0::2] + 1j * r[..., 1::2]


def vec(m: np.ndarray) -> np.ndarray:
    """Stack columns of a matrix into one vector (column-major)."""
    m = np.asarray(m)
    return m.reshape(m.shape[:-2] + (-1,), order="F") if m.ndim == 2 else _batched_vec(m)


def _batched_vec(m: np.ndarray) -> np.ndarray:
    # order="F" on the trailing two axes only
    swapped = np.swapaxes(m, -1, -2)
    return swapped.reshape(m.shape[:-2] + (m.shape[-1] * m.shape[-2],))


def unvec(v: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Inverse of vec for a known target shape."""
    v = np.asarray(v)
    out = v.reshape(v.shape[:-1] + (cols, rows))
    return np.swapaxes(out, -1, -2)


def is_unitary(m: np.ndarray, tol: float = 1e-9) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return fro_norm(m @ m.conj().T - np.eye(m.shape[0])) <= tol


def require_unitary(m: np.ndarray, what: str = "matrix", tol: float = 1e-9) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    if not is_unitary(m, tol):
        raise NotUnitary(f"{what} is not unitary at tolerance {tol:g}")
    return m


def rand_complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """i.i.d. standard complex normal entries (unit complex variance)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def rand_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed n x n unitary via QR of a Ginibre matrix.

    The R-diagonal phase fix makes the distribution exactly Haar rather
    than QR-convention dependent.
    """
    z = rand_complex_gaussian(rng, (n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
