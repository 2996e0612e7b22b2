"""Quadratic local normal form of a momentum map near a point of the fixed set.

Coordinates on the chart are ``z = (x, q) in R^k x R^N``.  The restricted map is

    Phi|_Q(x, q) = Phi(m) + (x, 1/2 sum_j lambda_j (q_j^2 + psi_j(x, q)^2))

where ``psi`` is a polynomial with vanishing constant and linear part.  The
unrestricted model replaces ``psi_j`` by the conjugate coordinate ``p_j``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DimensionMismatch, DomainError, OutOfChart
from .geomcone import Cone, cone_is_full

SIGN_TOL = 1e-12


class Polynomial:
    """Sparse real polynomial ``sum_t c_t z^{e_t}`` in a fixed number of variables."""

    def __init__(self, nvars: int, terms=()):
        terms = [(tuple(int(v) for v in e), float(c)) for e, c in terms]
        for e, _ in terms:
            if len(e) != nvars or min(e, default=0) < 0:
                raise DimensionMismatch(f"exponent {e} does not fit {nvars} variables")
        self.nvars = nvars
        self.exps = np.array([e for e, _ in terms], dtype=int).reshape(len(terms), nvars)
        self.coefs = np.array([c for _, c in terms], dtype=float)

    @property
    def degrees(self):
        return self.exps.sum(axis=1)

    def terms(self):
        return [(list(map(int, e)), float(c)) for e, c in zip(self.exps, self.coefs)]

    def __call__(self, z):
        """Evaluate on ``z`` of shape ``(nvars,)`` or ``(count, nvars)``."""
        z = np.asarray(z, dtype=float)
        mono = np.prod(z[..., np.newaxis, :] ** self.exps, axis=-1)
        return mono @ self.coefs

    def gradient(self, z):
        z = np.asarray(z, dtype=float)
        out = np.zeros(z.shape)
        for d in range(self.nvars):
            e = self.exps.copy()
            mult = e[:, d].astype(float)
            e[:, d] = np.maximum(e[:, d] - 1, 0)
            mono = np.prod(z[..., np.newaxis, :] ** e, axis=-1)
            out[..., d] = mono @ (self.coefs * mult)
        return out


@dataclass(frozen=True)
class LocalModel:
    k: int
    lambdas: np.ndarray      # (l, dim_t)
    N: int
    phi_m: np.ndarray        # (k + dim_t,)
    psi: tuple = ()          # l polynomials in k + N variables
    r: float = 1.0

    def __post_init__(self):
        lam = np.atleast_2d(np.asarray(self.lambdas, dtype=float))
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "phi_m", np.asarray(self.phi_m, dtype=float))
        if self.k < 0 or self.N < self.l:
            raise DimensionMismatch(f"need k >= 0 and N >= l, got k={self.k}, l={self.l}, N={self.N}")
        if self.phi_m.shape != (self.k + self.dim_t,):
            raise DimensionMismatch(f"phi_m must have length k + dim t = {self.k + self.dim_t}")
        if np.any(np.linalg.norm(lam, axis=1) == 0):
            raise DomainError("weights must be nonzero")
        psi = tuple(self.psi) or tuple(Polynomial(self.k + self.N) for _ in range(self.l))
        if len(psi) != self.l:
            raise DimensionMismatch(f"need {self.l} psi components, got {len(psi)}")
        for p in psi:
            if p.nvars != self.k + self.N:
                raise DimensionMismatch("psi components must be functions of (x, q)")
            if len(p.coefs) and p.degrees.min() < 2:
                raise DomainError("psi must have zero constant and linear part")
        object.__setattr__(self, "psi", psi)
        if not self.r > 0:
            raise DomainError("chart radius must be positive")

    @property
    def l(self) -> int:
        return self.lambdas.shape[0]

    @property
    def dim_t(self) -> int:
        return self.lambdas.shape[1]

    def psi_values(self, z):
        z = np.asarray(z, dtype=float)
        if not self.l:
            return np.zeros(z.shape[:-1] + (0,))
        return np.stack([p(z) for p in self.psi], axis=-1)

    def to_dict(self) -> dict:
        return {"k": self.k, "l": self.l, "N": self.N, "lambdas": self.lambdas.tolist(),
                "phi_m": self.phi_m.tolist(), "psi_coefficients": [p.terms() for p in self.psi],
                "r": self.r}

    @classmethod
    def from_dict(cls, d: dict) -> "LocalModel":
        k, n = int(d["k"]), int(d["N"])
        lam = np.array(d["lambdas"], dtype=float)
        if lam.shape[0] != int(d.get("l", lam.shape[0])):
            raise DimensionMismatch("l does not match the number of weights")
        psi = tuple(Polynomial(k + n, terms) for terms in d.get("psi_coefficients", ()))
        return cls(k=k, lambdas=lam, N=n, phi_m=np.array(d["phi_m"], dtype=float),
                   psi=psi, r=float(d.get("r", 1.0)))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "LocalModel":
        return cls.from_dict(json.loads(text))


def _split(m: LocalModel, x, q):
    x = np.asarray(x, dtype=float)
    q = np.asarray(q, dtype=float)
    if x.shape[-1:] != (m.k,) or q.shape[-1:] != (m.N,):
        raise DimensionMismatch(f"expected x in R^{m.k} and q in R^{m.N}")
    return x, q


def model_momentum(m: LocalModel, x, q, p):
    x, q = _split(m, x, q)
    p = np.asarray(p, dtype=float)
    if p.shape != q.shape:
        raise DimensionMismatch("p and q must have the same shape")
    rho = 0.5 * (q[..., : m.l] ** 2 + p[..., : m.l] ** 2)
    return m.phi_m + np.concatenate([x, rho @ m.lambdas], axis=-1)


def _check_chart(m: LocalModel, z):
    norm = np.linalg.norm(z, axis=-1)
    if np.any(norm > m.r):
        raise OutOfChart(f"|(x, q)| = {np.max(norm):.3g} exceeds the chart radius {m.r:g}")


def psi_map(m: LocalModel, x, q):
    """``(x, 1/2 (q_j^2 + psi_j^2))``: the restricted map in orthant coordinates."""
    x, q = _split(m, x, q)
    z = np.concatenate([x, q], axis=-1)
    _check_chart(m, z)
    rho = 0.5 * (q[..., : m.l] ** 2 + m.psi_values(z) ** 2)
    return np.concatenate([x, rho], axis=-1)


def model_momentum_restricted(m: LocalModel, x, q):
    w = psi_map(m, x, q)
    return m.phi_m + np.concatenate([w[..., : m.k], w[..., m.k:] @ m.lambdas], axis=-1)


# ---------------------------------------------------------------------------
# local maxima of a component

class Criticality(str, Enum):
    LOCAL_MAX = "LocalMax"
    NOT_LOCAL_MAX = "NotLocalMax"


def weight_values(m: LocalModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.shape != (m.dim_t,):
        raise DimensionMismatch(f"X must lie in R^{m.dim_t}")
    return m.lambdas @ X


def classify_critical(m: LocalModel, X, tol_sign: float = SIGN_TOL) -> Criticality:
    """The origin maximizes ``<Phi|_Q, X>`` locally iff every ``lambda_j(X) <= 0``."""
    if np.all(weight_values(m, X) <= tol_sign):
        return Criticality.LOCAL_MAX
    return Criticality.NOT_LOCAL_MAX


def component_excess(m: LocalModel, X, z) -> np.ndarray:
    """``Phi_X|_Q(z) - Phi_X(m)`` for ``X`` in t (the x-directions drop out)."""
    z = np.atleast_2d(z)
    rho = 0.5 * (z[:, m.k: m.k + m.l] ** 2 + m.psi_values(z) ** 2)
    return rho @ weight_values(m, X)


def ball_grid(dim: int, radius: float = 0.01, step: float = 1e-3) -> np.ndarray:
    ticks = np.arange(-radius, radius + step / 2, step)
    mesh = np.stack(np.meshgrid(*([ticks] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    return mesh[np.linalg.norm(mesh, axis=1) <= radius + 1e-15]


def grid_local_max(m: LocalModel, X, radius: float = 0.01, step: float = 1e-3, slack: float = 1e-15) -> bool:
    """Brute-force check: no grid point near the origin raises the X-component.

    Searches the coordinate axes first (which already detect any positive
    weight) and only then the full lattice ball.
    """
    ticks = np.arange(-radius, radius + step / 2, step)
    dim = m.k + m.N
    for j in range(m.l):
        z = np.zeros((len(ticks), dim))
        z[:, m.k + j] = ticks
        if component_excess(m, X, z).max() > slack:
            return False
    best = -np.inf
    grid = ball_grid(dim, radius, step)
    for chunk in np.array_split(grid, max(1, len(grid) // 200000)):
        best = max(best, component_excess(m, X, chunk).max())
    return bool(best <= slack)


# ---------------------------------------------------------------------------
# Gamma cone and the inner-point probe

def gamma_cone(m: LocalModel) -> Cone:
    return Cone(m.dim_t, m.lambdas)


@dataclass
class ProbeTarget:
    target: list
    residual: float
    iterations: int
    converged: bool


@dataclass
class ProbeResult:
    success: bool
    s0: float
    radius: float
    max_residual: float
    in_chart: bool
    targets: list = field(default_factory=list)

    @property
    def failures(self):
        return [t for t in self.targets if not t.converged]


def _restricted_system(m: LocalModel, u):
    """Psi on the slice q_{l+1..N} = 0; unknowns u = (x, q_1..q_l). Returns value and Jacobian."""
    z = np.zeros(m.k + m.N)
    z[: m.k + m.l] = u
    value = np.empty(m.k + m.l)
    jac = np.zeros((m.k + m.l, m.k + m.l))
    value[: m.k] = u[: m.k]
    jac[: m.k, : m.k] = np.eye(m.k)
    for j, p in enumerate(m.psi):
        pv = p(z)
        grad = p.gradient(z)[: m.k + m.l]
        qj = u[m.k + j]
        value[m.k + j] = 0.5 * (qj ** 2 + pv ** 2)
        row = pv * grad
        row[m.k + j] += qj
        jac[m.k + j] = row
    return value, jac


def newton_solve(m: LocalModel, target, u0, tol: float = 1e-6, max_iter: int = 60):
    """Damped Newton with backtracking on the residual norm."""
    u = np.array(u0, dtype=float)
    val, jac = _restricted_system(m, u)
    res = np.linalg.norm(val - target)
    it = 0
    while res > tol * 1e-6 and it < max_iter:
        it += 1
        try:
            step = np.linalg.lstsq(jac, target - val, rcond=None)[0]
        except np.linalg.LinAlgError:
            break
        t = 1.0
        while t > 1e-6:
            cand = u + t * step
            cval, cjac = _restricted_system(m, cand)
            cres = np.linalg.norm(cval - target)
            if cres < res:
                break
            t /= 2
        else:
            break
        u, val, jac, res = cand, cval, cjac, cres
    return u, float(res), it


def probe_targets(center, radius: float, grid_per_axis: int = 3) -> np.ndarray:
    """Center, the 2n axis points on the sphere, and a cube lattice inside the ball."""
    center = np.asarray(center, dtype=float)
    n = len(center)
    pts = [center]
    for i in range(n):
        for s in (-1, 1):
            e = np.zeros(n)
            e[i] = s * radius
            pts.append(center + e)
    ticks = np.linspace(-1, 1, grid_per_axis) * radius / np.sqrt(n)
    cube = np.stack(np.meshgrid(*([ticks] * n), indexing="ij"), axis=-1).reshape(-1, n)
    pts.extend(center + cube)
    return np.unique(np.array(pts), axis=0)


def inner_point_probe(m: LocalModel, v, s0: float, tol: float = 1e-6, require_full: bool = True) -> ProbeResult:
    """Check that every target near ``s0 * v`` in orthant coordinates is a value of Psi.

    ``v`` has positive entries with ``sum v_j lambda_j = 0``; it is normalized to
    unit length.  Targets fill the ball of radius ``s0 * min(v) / 2`` about
    ``(0, s0 v)``, a ball that stays inside the open orthant.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (m.l,) or np.any(v <= 0):
        raise DomainError("v must be a positive vector with one entry per weight")
    v = v / np.linalg.norm(v)
    if np.linalg.norm(v @ m.lambdas) > 1e-9 * np.abs(m.lambdas).max():
        raise DomainError("v does not give a vanishing combination of the weights")
    if not 0 < s0:
        raise DomainError("s0 must be positive")
    if require_full and not cone_is_full(gamma_cone(m)):
        raise DomainError("the weight cone is not full")
    radius = s0 * v.min() / 2
    center = np.concatenate([np.zeros(m.k), s0 * v])
    results = []
    in_chart = True
    for target in probe_targets(center, radius):
        w = np.maximum(target[m.k:], 0.0)
        u0 = np.concatenate([target[: m.k], np.sqrt(2 * w)])
        u, res, it = newton_solve(m, target, u0, tol)
        in_chart &= bool(np.linalg.norm(u) <= m.r)
        results.append(ProbeTarget(target.tolist(), res, it, bool(np.isfinite(res) and res <= tol)))
    worst = max(t.residual for t in results)
    return ProbeResult(all(t.converged for t in results), s0, radius, worst, in_chart, results)


# ---------------------------------------------------------------------------
# random models

def random_psi(rng, nvars: int, n_terms: int = 3, coef_bound: float = 1.0) -> Polynomial:
    terms = []
    for _ in range(n_terms):
        deg = int(rng.integers(2, 5))
        e = np.zeros(nvars, dtype=int)
        for i in rng.integers(0, nvars, deg):
            e[i] += 1
        terms.append((e, rng.uniform(-coef_bound, coef_bound)))
    return Polynomial(nvars, terms)


def random_model(rng, k: int, l: int, N: int, dim_t: int, coef_bound: float = 1.0) -> LocalModel:
    lam = rng.standard_normal((l, dim_t))
    psi = tuple(random_psi(rng, k + N, coef_bound=coef_bound) for _ in range(l))
    return LocalModel(k=k, lambdas=lam, N=N, phi_m=rng.standard_normal(k + dim_t), psi=psi)


def planted_full_model(rng, k: int, dim_t: int, l: int, N: int, coef_bound: float = 0.1):
    """A model whose weights satisfy ``sum v_j lambda_j = 0`` for a known positive v."""
    if l < dim_t + 1:
        raise DomainError("a full cone in R^d needs at least d + 1 weights")
    while True:
        lam = rng.standard_normal((l, dim_t))
        v = rng.uniform(0.5, 1.5, l)
        lam[-1] = -(v[:-1] @ lam[:-1]) / v[-1]
        if np.linalg.matrix_rank(lam[:-1]) == dim_t and np.linalg.norm(lam[-1]) > 0.1:
            break
    psi = tuple(random_psi(rng, k + N, coef_bound=coef_bound) for _ in range(l))
    return LocalModel(k=k, lambdas=lam, N=N, phi_m=rng.standard_normal(k + dim_t), psi=psi), v


def _random_x(rng, m: LocalModel, want_max: bool, margin: float):
    """Random X whose weight values are all at least ``margin`` away from zero."""
    for _ in range(1000):
        X = rng.standard_normal(m.dim_t)
        X /= np.linalg.norm(X)
        vals = m.lambdas @ X / np.linalg.norm(m.lambdas, axis=1)
        if np.abs(vals).min() < margin:
            continue
        if want_max == bool(np.all(vals < 0)):
            return X
    return None


def local_max_agreement_suite(count: int = 50, seed: int = 0, margin: float = 0.05) -> dict:
    """classify_critical against brute-force grid search on random models."""
    rng = np.random.default_rng([seed, 32])
    disagreements = []
    n_max = 0
    done = 0
    while done < count:
        l = int(rng.integers(1, 4))
        N = int(rng.integers(l, 5))
        k = int(rng.integers(0, 2))
        dim_t = int(rng.integers(1, 3))
        want_max = done % 2 == 0
        m = random_model(rng, k, l, N, dim_t)
        if want_max:
            # flip weights so that a random X sees them all negative
            X = rng.standard_normal(dim_t)
            X /= np.linalg.norm(X)
            lam = m.lambdas * -np.sign(m.lambdas @ X)[:, np.newaxis]
            m = LocalModel(k=k, lambdas=lam, N=N, phi_m=m.phi_m, psi=m.psi)
        X = _random_x(rng, m, want_max, margin)
        if X is None:
            continue
        done += 1
        predicted = classify_critical(m, X) is Criticality.LOCAL_MAX
        observed = grid_local_max(m, X)
        n_max += predicted
        if predicted != observed:
            disagreements.append({"model": m.to_dict(), "X": X.tolist(),
                                  "predicted": predicted, "grid": observed})
    return {"count": count, "local_max": n_max, "disagreements": len(disagreements),
            "examples": disagreements[:3], "pass": not disagreements}


def inner_point_suite(count: int = 20, seed: int = 0, s0: float = 0.01, tol: float = 1e-6) -> dict:
    rng = np.random.default_rng([seed, 34])
    failures = []
    worst = 0.0
    for i in range(count):
        dim_t = 1 + i % 2
        l = int(rng.integers(dim_t + 1, 4))
        N = int(rng.integers(l, 5))
        k = int(rng.integers(0, 2))
        m, v = planted_full_model(rng, k, dim_t, l, N)
        res = inner_point_probe(m, v, s0, tol)
        worst = max(worst, res.max_residual)
        if not res.success:
            failures.append({"index": i, "model": m.to_dict(), "v": v.tolist(),
                             "failed_targets": len(res.failures)})
    return {"count": count, "s0": s0, "max_residual": worst, "failures": len(failures),
            "examples": failures[:3], "pass": not failures}
