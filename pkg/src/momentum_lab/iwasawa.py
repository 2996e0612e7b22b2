"""Group-level Iwasawa factorization ``g = n a t k``.

For real families ``t`` is the identity and ``k`` lies in K.  For complexified
families the decomposition is G_C = N1 A exp(i t1) U and ``k`` lies in U.

The factorization is computed in the family's adapted basis: the Gram matrix
``P = g g^H`` is Cholesky-factored as ``P = b b^H`` with ``b`` upper triangular
with positive diagonal.  Since ``b`` must equal ``n a t`` by uniqueness, the
diagonal of ``b`` carries ``a t`` and ``k = b^{-1} g``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NotInGroup
from .liecore import GroupFamily, weyl_group
from .numkit import cholesky_hermitian, mat_exp

NORM_GUARD = 1e6
GROUP_TOL = 1e-10


@dataclass(frozen=True)
class IwasawaFactors:
    n: np.ndarray
    a: np.ndarray
    t: np.ndarray  # exp(i t1)-factor; identity for real families
    k: np.ndarray
    log_a: np.ndarray
    t1_part: np.ndarray

    def product(self):
        return self.n @ self.a @ self.t @ self.k

    @property
    def b(self):
        """The B1-factor ``n a t`` (equal to ``n a`` for real families)."""
        return self.n @ self.a @ self.t


def _check_input(fam: GroupFamily, g):
    g = np.asarray(g)
    if g.shape != (fam.rep_dim, fam.rep_dim):
        raise NotInGroup(f"{fam.name}: expected {fam.rep_dim}x{fam.rep_dim} matrix, got {g.shape}")
    scale = float(np.abs(g).max())
    if scale > NORM_GUARD:
        raise DomainError(f"|g| = {scale:.3e} exceeds the overflow guard {NORM_GUARD:g}")
    if fam.group_residual(g) > GROUP_TOL * max(1.0, scale) ** 2:
        raise NotInGroup(f"matrix does not satisfy the defining relations of {fam.name}")
    return g.astype(fam.dtype)


def _adapted_b(fam: GroupFamily, ga):
    p = ga @ np.conj(np.swapaxes(ga, -1, -2))
    return cholesky_hermitian(p)


def iwasawa_factor(fam: GroupFamily, g, check: bool = True) -> IwasawaFactors:
    g = _check_input(fam, g) if check else np.asarray(g, dtype=fam.dtype)
    ga = fam.to_adapted(g)
    b = _adapted_b(fam, ga)
    d = np.diag(b).real
    logd = np.log(d)
    if fam.log_diag_residual(logd) > 1e-8 * max(1.0, np.abs(logd).max()):
        raise NotInGroup(f"{fam.name}: diagonal of the triangular factor is not in exp(a + i t1)")
    log_a, t1 = fam.split_log_diagonal(logd)
    _, diag_map, n_t = fam._log_diag_map
    a_diag = np.exp(diag_map[:, : fam.rank] @ log_a)
    t_diag = np.exp(diag_map[:, fam.rank:fam.rank + n_t] @ t1) if n_t else np.ones(fam.rep_dim)
    n_ad = b / d[np.newaxis, :]
    k_ad = np.linalg.solve(b, ga)
    return IwasawaFactors(
        n=fam.from_adapted(n_ad),
        a=fam.from_adapted(np.diag(a_diag).astype(fam.dtype)),
        t=fam.from_adapted(np.diag(t_diag).astype(fam.dtype)),
        k=fam.from_adapted(k_ad),
        log_a=log_a,
        t1_part=t1,
    )


def log_a_projection(fam: GroupFamily, g) -> np.ndarray:
    """a-coordinates of log a~(g); the exp(i t1) part is dropped for complexified families."""
    return iwasawa_factor(fam, g).log_a


def log_a_batch(fam: GroupFamily, gs) -> np.ndarray:
    """Vectorized ``log_a_projection`` for a stack ``(count, n, n)``; no membership checks."""
    gs = np.asarray(gs, dtype=fam.dtype)
    c = fam.adapted_change
    ga = np.conj(c.T) @ gs @ c
    b = _adapted_b(fam, ga)
    logd = np.log(np.diagonal(b, axis1=-2, axis2=-1).real)
    return fam.split_log_diagonal(logd)[0]


def b_factor_batch(fam: GroupFamily, gs) -> np.ndarray:
    """Stack of B1-factors ``n a t`` in defining coordinates."""
    gs = np.asarray(gs, dtype=fam.dtype)
    c = fam.adapted_change
    b = _adapted_b(fam, np.conj(c.T) @ gs @ c)
    return c @ b @ np.conj(c.T)


# ---------------------------------------------------------------------------
# random test elements and suites

def random_algebra_element(fam: GroupFamily, rng, max_norm: float = 2.0):
    """Random element of g (or g_C) with Frobenius norm uniform in (0, max_norm]."""
    basis = fam.real_algebra_basis
    coeffs = rng.standard_normal(len(basis))
    if fam.complexified:
        coeffs = coeffs + 1j * rng.standard_normal(len(basis))
    x = sum(c * b for c, b in zip(coeffs, basis))
    norm = np.linalg.norm(x)
    return x * (max_norm * (1.0 - rng.random()) / norm)


def random_group_element(fam: GroupFamily, rng, max_norm: float = 2.0):
    return mat_exp(random_algebra_element(fam, rng, max_norm))


def random_nilpotent_element(fam: GroupFamily, rng, scale: float = 1.0):
    basis = fam.basis_n1 if fam.complexified else fam.basis_n
    coeffs = rng.standard_normal(len(basis))
    if fam.complexified:
        coeffs = coeffs + 1j * rng.standard_normal(len(basis))
    return mat_exp(scale * sum(c * b for c, b in zip(coeffs, basis)))


def roundtrip_suite(fam: GroupFamily, count: int = 1000, seed: int = 0) -> dict:
    """Reconstruction and refactorization stability over random ``exp(X)``, |X| <= 2."""
    rng = np.random.default_rng([seed, 9])
    worst_rec = 0.0
    worst_stab = 0.0
    for _ in range(count):
        g = random_group_element(fam, rng)
        f = iwasawa_factor(fam, g)
        rec = np.linalg.norm(f.product() - g) / np.linalg.norm(g)
        f2 = iwasawa_factor(fam, f.product())
        stab = max(np.abs(f2.n - f.n).max(), np.abs(f2.a - f.a).max(),
                   np.abs(f2.t - f.t).max(), np.abs(f2.k - f.k).max())
        worst_rec = max(worst_rec, float(rec))
        worst_stab = max(worst_stab, float(stab))
    return {"family": fam.name, "count": count, "max_reconstruction": worst_rec,
            "max_refactor_drift": worst_stab,
            "pass": worst_rec <= 1e-10 and worst_stab <= 1e-8}


def weyl_vertex_errors(fam: GroupFamily, y) -> list[float]:
    """|log a~(k_w exp Y) - w.Y| for every stored Weyl representative."""
    w = weyl_group(fam)
    ey = mat_exp(fam.a_matrix(y)).astype(fam.dtype)
    out = []
    for wm, kw in zip(w.elements, w.representatives):
        got = log_a_projection(fam, kw @ ey)
        out.append(float(np.abs(got - wm @ np.atleast_1d(y)).max()))
    return out
