"""Dense small-matrix kernel.

Matrices are plain numpy arrays (real or complex, double precision).  The
factorizations here accept stacks of matrices of shape ``(..., n, n)`` where
that is cheap to support, since the Monte-Carlo drivers factor hundreds of
thousands of 3x3 matrices at a time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, DomainError, NotPositiveDefinite, SingularInput

# relative cutoff for singular values / Cholesky pivots
PIVOT_RTOL = 1e-13


@dataclass(frozen=True)
class Tolerance:
    tol_abs: float = 1e-12
    tol_rel: float = 1e-12

    def __post_init__(self):
        for v in (self.tol_abs, self.tol_rel):
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"tolerances must be finite and >= 0, got {v}")


DEFAULT_TOL = Tolerance()


def mat_close(a, b, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Entrywise comparison ``|a_ij - b_ij| <= tol_abs + tol_rel * max(|a|, |b|)``.

    ``max(|a|, |b|)`` is the largest entry magnitude of either matrix.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    scale = max(np.abs(a).max(initial=0.0), np.abs(b).max(initial=0.0))
    return bool(np.abs(a - b).max(initial=0.0) <= tol.tol_abs + tol.tol_rel * scale)


def is_complex(a) -> bool:
    return np.iscomplexobj(a)


def _flip(a):
    return a[..., ::-1, ::-1]


def _check_square(a):
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise DimensionMismatch(f"expected square matrix, got shape {a.shape}")


def rq_factor(g, pivot_rtol: float = PIVOT_RTOL):
    """Factor ``g = r @ q`` with ``r`` upper triangular (positive real diagonal)
    and ``q`` orthogonal/unitary.

    Computed from a QR factorization of the row-flipped conjugate transpose.
    """
    g = np.asarray(g)
    _check_square(g)
    s = np.linalg.svd(g, compute_uv=False)
    if s[-1] < pivot_rtol * s[0] or s[0] == 0:
        raise SingularInput(f"smallest singular value {s[-1]:.3e} below cutoff")
    flipped = g[::-1, :]
    q1, r1 = np.linalg.qr(flipped.conj().T)
    # flipped = r1^H q1^H  =>  g = (P r1^H P) (P q1^H)
    r = _flip(r1.conj().T)
    q = q1.conj().T[::-1, :]
    phases = np.diag(r) / np.abs(np.diag(r))
    r = r / phases[np.newaxis, :]
    q = phases[:, np.newaxis] * q
    if not is_complex(g):
        r, q = r.real, q.real
    return r, q


def cholesky_hermitian(p, pivot_rtol: float = PIVOT_RTOL):
    """Upper-triangular ``b`` with positive diagonal and ``p = b @ b^H``.

    Works on stacks ``(..., n, n)``.  This is the "reverse" Cholesky factor:
    the usual lower factor of the index-flipped matrix, flipped back.
    """
    p = np.asarray(p)
    _check_square(p)
    try:
        low = np.linalg.cholesky(_flip(p))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    b = _flip(low)
    diag = np.abs(np.diagonal(b, axis1=-2, axis2=-1))
    norm = np.abs(p).max(axis=(-2, -1))
    # pivot^2 is compared against the matrix scale
    if np.any(diag.min(axis=-1) ** 2 <= pivot_rtol * norm):
        raise NotPositiveDefinite("Cholesky pivot below cutoff")
    return b


def mat_exp(x):
    return scipy.linalg.expm(np.asarray(x))


def mat_log_triangular_positive(a):
    """Principal logarithm of an upper-triangular matrix with positive real diagonal."""
    a = np.asarray(a)
    _check_square(a)
    scale = max(np.abs(a).max(), 1.0)
    if np.abs(np.tril(a, -1)).max(initial=0.0) > 1e-12 * scale:
        raise DomainError("matrix is not upper triangular")
    d = np.diag(a)
    if np.any(np.abs(d.imag) > 1e-12 * scale) or np.any(d.real <= 0):
        raise DomainError("diagonal must be real and positive")
    a = np.triu(a)
    n = a.shape[0]
    if np.allclose(a, np.diag(d), rtol=0, atol=0):
        return np.diag(np.log(d.real)).astype(a.dtype)
    # scalar times unipotent: the log series terminates
    if np.all(d == d[0]):
        u = a / d[0] - np.eye(n)
        out = np.log(d[0].real) * np.eye(n, dtype=a.dtype)
        term = np.eye(n, dtype=a.dtype)
        for k in range(1, n):
            term = term @ u
            out = out + ((-1) ** (k + 1) / k) * term
        return out
    out = scipy.linalg.logm(a)
    if not is_complex(a):
        out = out.real
    return np.triu(out)


def solve_linear(a, rhs, pivot_rtol: float = PIVOT_RTOL):
    a = np.asarray(a)
    rhs = np.asarray(rhs)
    _check_square(a)
    if rhs.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"rhs has {rhs.shape[0]} rows, matrix has {a.shape[0]}")
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0 or s[-1] < pivot_rtol * s[0]:
        raise SingularInput(f"smallest singular value {s[-1]:.3e} below cutoff")
    return np.linalg.solve(a, rhs)


# ---------------------------------------------------------------------------
# Haar sampling

def haar_orthogonal(rng: np.random.Generator, n: int, count: int, special: bool = True):
    """``count`` Haar-distributed ``n x n`` orthogonal matrices (SO(n) if ``special``)."""
    z = rng.standard_normal((count, n, n))
    q, r = np.linalg.qr(z)
    signs = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    signs[signs == 0] = 1.0
    q = q * signs[:, np.newaxis, :]
    if special:
        neg = np.linalg.det(q) < 0
        q[neg, :, 0] *= -1.0
    return q


def haar_unitary(rng: np.random.Generator, n: int, count: int, special: bool = True):
    """``count`` Haar-distributed ``n x n`` unitary matrices (SU(n) if ``special``)."""
    z = (rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    phases = d / np.abs(d)
    q = q * phases[:, np.newaxis, :]
    if special:
        det = np.linalg.det(q)
        q = q * np.exp(-1j * np.angle(det) / n)[:, np.newaxis, np.newaxis]
    return q
