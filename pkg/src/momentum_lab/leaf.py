"""Symplectic leaves ``M_a = b(U a)`` of the Iwasawa group B1 and their torus action.

A leaf point is stored by its B1-coordinate ``b`` together with a unitary
representative ``u`` such that ``u a = b u'`` for some ``u'`` in U.  The torus
``T = exp(i a)`` acts by ``t.b = b(t u a)`` with momentum map the Iwasawa
projection ``log a~(u a)``.  The involution ``tau_a`` is induced by entrywise
complex conjugation, which is the conjugation of G_C over its real form in
the matrix realizations used here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotCompact, NotInCompactAlgebra, NotInTorus, UnsupportedFamily
from .iwasawa import iwasawa_factor, log_a_projection
from .liecore import GroupFamily, iwasawa_project_algebra, make_family, real_form
from .numkit import mat_exp

UNITARY_TOL = 1e-10
FD_STEP = 1e-5


@dataclass(frozen=True)
class Leaf:
    fam: GroupFamily
    log_a: np.ndarray  # a-coordinates of the base point

    def __post_init__(self):
        if not self.fam.complexified:
            raise UnsupportedFamily(f"{self.fam.name} is not a complexified family")
        h = np.atleast_1d(np.asarray(self.log_a, dtype=float))
        if h.shape != (self.fam.rank,):
            raise ValueError(f"{self.fam.name}: expected {self.fam.rank} a-coordinates")
        object.__setattr__(self, "log_a", h)

    @classmethod
    def create(cls, family: str | GroupFamily, log_a) -> "Leaf":
        fam = make_family(family) if isinstance(family, str) else family
        return cls(fam, log_a)

    @property
    def fam_real(self) -> GroupFamily:
        return real_form(self.fam)

    @property
    def a(self) -> np.ndarray:
        return mat_exp(self.fam.a_matrix(self.log_a)).astype(complex)


@dataclass(frozen=True)
class LeafPoint:
    b: np.ndarray
    u: np.ndarray


def _require_unitary(leaf: Leaf, u):
    u = np.asarray(u, dtype=complex)
    if u.shape != (leaf.fam.rep_dim,) * 2:
        raise NotCompact(f"expected a {leaf.fam.rep_dim}x{leaf.fam.rep_dim} matrix")
    if leaf.fam.compact_residual(u) > UNITARY_TOL or leaf.fam.group_residual(u) > UNITARY_TOL:
        raise NotCompact("representative is not in the compact subgroup U")
    return u


def leaf_point(leaf: Leaf, u) -> LeafPoint:
    u = _require_unitary(leaf, u)
    return LeafPoint(iwasawa_factor(leaf.fam, u @ leaf.a).b, u)


def b_tilde(fam: GroupFamily, g) -> np.ndarray:
    """B1-factor of ``g`` (drops the unitary part)."""
    return iwasawa_factor(fam, g).b


def reconstruct_residual(leaf: Leaf, pt: LeafPoint) -> float:
    """| b u' - u a | with u' = b^{-1} u a, together with the unitarity of u'."""
    ua = pt.u @ leaf.a
    u_prime = np.linalg.solve(pt.b, ua)
    return max(float(np.abs(pt.b @ u_prime - ua).max()), leaf.fam.compact_residual(u_prime))


# ---------------------------------------------------------------------------
# torus action

def torus_element(leaf: Leaf, h) -> np.ndarray:
    """``exp(i H)`` for ``H`` given in a-coordinates."""
    return mat_exp(1j * leaf.fam.a_matrix(h))


def check_torus(leaf: Leaf, t, tol: float = UNITARY_TOL):
    t = np.asarray(t, dtype=complex)
    fam = leaf.fam
    if t.shape != (fam.rep_dim,) * 2 or fam.compact_residual(t) > tol or fam.group_residual(t) > tol:
        raise NotInTorus("element is not unitary in the group")
    for x in fam.basis_a + fam.basis_m:
        if np.abs(t @ x - x @ t).max() > tol * max(1.0, np.abs(x).max()):
            raise NotInTorus("element does not centralize a + m")
    return t


def torus_act(leaf: Leaf, t, pt: LeafPoint) -> LeafPoint:
    t = check_torus(leaf, t)
    return leaf_point(leaf, t @ pt.u)


# ---------------------------------------------------------------------------
# tangent vectors and the symplectic form

def _require_compact_algebra(leaf: Leaf, x):
    x = np.asarray(x, dtype=complex)
    _, _, comp = iwasawa_project_algebra(leaf.fam, x)
    if np.abs(comp - x).max() > 1e-10 * max(1.0, np.abs(x).max()):
        raise NotInCompactAlgebra("element is not in the compact real form u")
    return x


def _ad_inv(b, x):
    return np.linalg.solve(b, x @ b)


def vector_field(leaf: Leaf, x, pt: LeafPoint) -> np.ndarray:
    """``X~_b = b pr_b1(Ad(b)^{-1} X)``: the dressing vector field at ``b``."""
    x = _require_compact_algebra(leaf, x)
    nil, ab, _ = iwasawa_project_algebra(leaf.fam, _ad_inv(pt.b, x))
    return pt.b @ (nil + ab)


def vector_field_fd(leaf: Leaf, x, pt: LeafPoint, step: float = FD_STEP) -> np.ndarray:
    """Central difference of ``s -> b(exp(sX) b)``; a test oracle for ``vector_field``."""
    x = np.asarray(x, dtype=complex)
    plus = b_tilde(leaf.fam, mat_exp(step * x) @ pt.b)
    minus = b_tilde(leaf.fam, mat_exp(-step * x) @ pt.b)
    return (plus - minus) / (2 * step)


def omega_at(fam: GroupFamily, b, x, y) -> float:
    """``Im tr(pr_u(Ad(b)^{-1} X) Ad(b)^{-1} Y)`` for the vector fields of X, Y at b."""
    xb = _ad_inv(b, x)
    yb = _ad_inv(b, y)
    return float(np.trace(iwasawa_project_algebra(fam, xb)[2] @ yb).imag)


def symplectic_form(leaf: Leaf, pt: LeafPoint, x, y) -> float:
    x = _require_compact_algebra(leaf, x)
    y = _require_compact_algebra(leaf, y)
    return omega_at(leaf.fam, pt.b, x, y)


def momentum(leaf: Leaf, pt: LeafPoint) -> np.ndarray:
    return log_a_projection(leaf.fam, pt.u @ leaf.a)


def involution_tau(leaf: Leaf, pt: LeafPoint) -> LeafPoint:
    return leaf_point(leaf, np.conj(pt.u))


# ---------------------------------------------------------------------------
# leaf checks

@dataclass
class LeafReport:
    family: str
    log_a: list
    n_samples: int
    seed: int
    lagrangian_residual: float
    equivariance_residual: float
    momentum_invariance_residual: float
    antisymplectic_probe: float
    tol: float = 1e-8

    @property
    def passed(self) -> bool:
        return max(self.lagrangian_residual, self.equivariance_residual,
                   self.momentum_invariance_residual) <= self.tol

    def to_dict(self) -> dict:
        return {"family": self.family, "log_a": self.log_a, "n_samples": self.n_samples,
                "seed": self.seed, "lagrangian_residual": self.lagrangian_residual,
                "equivariance_residual": self.equivariance_residual,
                "momentum_invariance_residual": self.momentum_invariance_residual,
                "antisymplectic_probe": self.antisymplectic_probe, "pass": self.passed}


def antisymplectic_defect(leaf: Leaf, pt: LeafPoint, x, y) -> float:
    """``|omega_{tau b}(dtau X~, dtau Y~) + omega_b(X~, Y~)|`` using ``dtau X~_b = (tau X)~_{tau b}``."""
    tb = involution_tau(leaf, pt)
    return abs(omega_at(leaf.fam, tb.b, np.conj(x), np.conj(y)) + omega_at(leaf.fam, pt.b, x, y))


def check_leaf_properties(leaf: Leaf, n_samples: int = 100, seed: int = 0, tol: float = 1e-8) -> LeafReport:
    """Lagrangian fixed component, torus equivariance of tau_a, and tau_a-invariance of the momentum."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    fam = leaf.fam
    rng = np.random.default_rng([seed, 431])
    ks = fam.haar_k(rng, n_samples)
    us = fam.haar_u(rng, n_samples)
    k_basis = [np.asarray(x, dtype=complex) for x in fam.basis_k]
    ip_basis = [1j * np.asarray(x, dtype=complex) for x in fam.basis_p]

    lag = 0.0
    for k in ks:
        b = leaf_point(leaf, k).b
        for i, x in enumerate(k_basis):
            for y in k_basis[i + 1:]:
                lag = max(lag, abs(omega_at(fam, b, x, y)))

    equi = inv = probe = 0.0
    for u in us:
        pt = leaf_point(leaf, u)
        t = torus_element(leaf, rng.standard_normal(fam.rank))
        lhs = involution_tau(leaf, torus_act(leaf, t, pt)).b
        rhs = torus_act(leaf, np.conj(t.T), involution_tau(leaf, pt)).b
        equi = max(equi, float(np.abs(lhs - rhs).max()))
        inv = max(inv, float(np.abs(momentum(leaf, involution_tau(leaf, pt)) - momentum(leaf, pt)).max()))
        for i, x in enumerate(ip_basis):
            for y in ip_basis[i + 1:]:
                probe = max(probe, antisymplectic_defect(leaf, pt, x, y))
    return LeafReport(fam.name, leaf.log_a.tolist(), n_samples, seed, lag, equi, inv, probe, tol)


# ---------------------------------------------------------------------------
# the SO(1,4) computation: omega does not vanish at a tau-fixed point

I = 1j

EXAMPLE_N = np.array([
    [5 / 2, 1, 1, 1, -3 / 2],
    [1, 1, 0, 0, -1],
    [1, 0, 1, 0, -1],
    [1, 0, 0, 1, -1],
    [3 / 2, 1, 1, 1, -1 / 2],
])

EXAMPLE_X = np.zeros((5, 5), dtype=complex)
EXAMPLE_X[0, 3] = EXAMPLE_X[3, 0] = I

EXAMPLE_Y = np.zeros((5, 5), dtype=complex)
EXAMPLE_Y[0, 1] = EXAMPLE_Y[1, 0] = I

REFERENCE_AD_X = I * np.array([
    [0, -1, -1, 3 / 2, -1],
    [-1, 0, 0, -1, 1],
    [-1, 0, 0, -1, 1],
    [3 / 2, 1, 1, 0, -1 / 2],
    [-1, -1, -1, 1 / 2, 0],
])

REFERENCE_AD_Y = I * np.array([
    [0, 3 / 2, -1, -1, -1],
    [3 / 2, 0, 1, 1, -1 / 2],
    [-1, -1, 0, 0, 1],
    [-1, -1, 0, 0, 1],
    [-1, 1 / 2, -1, -1, 0],
])

REFERENCE_PR_U_X = np.array([
    [0, 0, 0, I, -I],
    [0, 0, 0, -1, 0],
    [0, 0, 0, 1, 0],
    [I, 1, -1, 0, 0],
    [-I, 0, 0, 0, 0],
])

REFERENCE_PRODUCT_DIAGONAL = np.array([0, I, 0, 1 + I, -1])
REFERENCE_OMEGA = 2.0


def kak_rank_one(fam_real: GroupFamily, g):
    """``g = k1 exp(t H) k2`` for SO_e(1, n) with H the a-generator.

    ``(g g^T)_{11} = cosh 2t`` and the first column of ``g g^T`` fixes the
    rotation part of ``k1``.
    """
    g = np.asarray(g, dtype=float)
    d = g.shape[0]
    p = g @ g.T
    t = 0.5 * np.arccosh(max(p[0, 0], 1.0))
    k1 = np.eye(d)
    if t > 1e-12:
        target = p[1:, 0] / np.sinh(2 * t)
        # rotation of R^{d-1} taking the last basis vector to ``target``
        e = np.zeros(d - 1)
        e[-1] = 1.0
        basis = np.column_stack([target, np.eye(d - 1)])
        q = np.linalg.qr(basis)[0]
        q[:, 0] *= np.sign(q[:, 0] @ target)
        r = np.roll(q, -1, axis=1)  # maps e_last -> target
        if np.linalg.det(r) < 0:
            r[:, 0] *= -1.0
        k1[1:, 1:] = r
    a = mat_exp(t * fam_real.basis_a[0])
    k2 = np.linalg.solve(k1 @ a, g)
    return k1, t, k2


@dataclass
class ExampleResult:
    log_a: float
    ad_x: np.ndarray
    ad_y: np.ndarray
    pr_u_x: np.ndarray
    product_diagonal: np.ndarray
    omega: float
    leaf_b_error: float
    stage_errors: dict

    def matches(self, tol_matrix: float = 1e-12, tol_omega: float = 1e-9) -> bool:
        return (all(v <= tol_matrix for v in self.stage_errors.values())
                and abs(self.omega - REFERENCE_OMEGA) <= tol_omega)


def example_so14(n=None) -> ExampleResult:
    """Evaluate omega_n(X~, Y~) for the fixed unipotent n and X, Y in i p.

    ``n`` is located on a leaf through a rank-one KAK decomposition
    ``n = k1 a k2`` (so ``n = b(k1 a)``); the leaf coordinate is cross-checked.
    """
    fam = make_family("so5c")
    n = EXAMPLE_N if n is None else np.asarray(n, dtype=float)
    k1, t, _ = kak_rank_one(real_form(fam), n)
    leaf = Leaf(fam, np.array([t]))
    pt = leaf_point(leaf, k1.astype(complex))
    b = n.astype(complex)
    ad_x = _ad_inv(b, EXAMPLE_X)
    ad_y = _ad_inv(b, EXAMPLE_Y)
    pr = iwasawa_project_algebra(fam, ad_x)[2]
    prod_diag = np.diag(pr @ ad_y)
    omega = float(np.trace(pr @ ad_y).imag)
    errs = {
        "ad_x": float(np.abs(ad_x - REFERENCE_AD_X).max()),
        "ad_y": float(np.abs(ad_y - REFERENCE_AD_Y).max()),
        "pr_u_x": float(np.abs(pr - REFERENCE_PR_U_X).max()),
        "product_diagonal": float(np.abs(prod_diag - REFERENCE_PRODUCT_DIAGONAL).max()),
    }
    return ExampleResult(t, ad_x, ad_y, pr, prod_diag, omega,
                         float(np.abs(pt.b - b).max()), errs)
