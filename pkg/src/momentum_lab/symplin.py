"""Linear symplectic algebra and the involution equivalence suite.

Conventions: ``Omega(u, v) = u^T omega v``.  Subspaces are stored by a basis
matrix whose columns span them.  All tests are scale-aware: bases are
orthonormalized before evaluating the form, and residuals are compared with
``tol * max|omega|``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NotComplementary, NotInvolution, NotLagrangian, SingularInput

TOL = 1e-10


@dataclass(frozen=True)
class SympSpace:
    omega: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] % 2 or w.shape[0] == 0:
            raise DimensionMismatch(f"omega must be a nonempty even square matrix, got {w.shape}")
        scale = np.abs(w).max()
        if np.abs(w + w.T).max() > TOL * scale:
            raise DimensionMismatch("omega is not antisymmetric")
        if abs(np.linalg.det(w)) <= 1e-12:
            raise SingularInput("omega is degenerate")
        object.__setattr__(self, "omega", w)

    @property
    def dim(self) -> int:
        return self.omega.shape[0]

    @property
    def n(self) -> int:
        return self.dim // 2

    @property
    def scale(self) -> float:
        return float(np.abs(self.omega).max())

    def form(self, u, v):
        return np.asarray(u).T @ self.omega @ np.asarray(v)


@dataclass(frozen=True)
class Subspace:
    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim == 1:
            b = b[:, np.newaxis]
        if b.shape[1] and np.linalg.matrix_rank(b, tol=1e-10 * max(1.0, np.abs(b).max())) != b.shape[1]:
            raise DimensionMismatch("basis columns are linearly dependent")
        object.__setattr__(self, "basis", b)

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(np.zeros((ambient_dim, 0)))

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def orthonormal(self) -> np.ndarray:
        if self.dim == 0:
            return self.basis
        return np.linalg.qr(self.basis)[0]


def subspace_equal(a: Subspace, b: Subspace, tol: float = TOL) -> bool:
    """Mutual containment, tested by the rank of the stacked bases."""
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch("subspaces live in different ambient spaces")
    if a.dim != b.dim:
        return False
    if a.dim == 0:
        return True
    qa, qb = a.orthonormal(), b.orthonormal()
    # distance of each basis vector of b from span(a)
    resid = qb - qa @ (qa.T @ qb)
    return bool(np.abs(resid).max() <= tol * 10)


@dataclass(frozen=True)
class LinInvolution:
    tau: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.tau, dtype=float)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise DimensionMismatch(f"tau must be square, got {t.shape}")
        if np.abs(t @ t - np.eye(t.shape[0])).max() > TOL * max(1.0, np.abs(t).max()) ** 2:
            raise NotInvolution("tau^2 differs from the identity")
        object.__setattr__(self, "tau", t)


@dataclass(frozen=True)
class LinTorusAction:
    generators: tuple

    def __post_init__(self):
        gens = tuple(np.asarray(x, dtype=float) for x in self.generators)
        for x in gens:
            if x.ndim != 2 or x.shape[0] != x.shape[1]:
                raise DimensionMismatch("generators must be square matrices")
        if len({x.shape for x in gens}) > 1:
            raise DimensionMismatch("generators have different shapes")
        object.__setattr__(self, "generators", gens)


def _check_sub(space: SympSpace, sub: Subspace):
    if sub.ambient_dim != space.dim:
        raise DimensionMismatch(f"subspace lives in R^{sub.ambient_dim}, space is R^{space.dim}")


def isotropy_residual(space: SympSpace, sub: Subspace) -> float:
    _check_sub(space, sub)
    if sub.dim == 0:
        return 0.0
    q = sub.orthonormal()
    return float(np.abs(q.T @ space.omega @ q).max())


def is_isotropic(space: SympSpace, sub: Subspace, tol: float = TOL) -> bool:
    return isotropy_residual(space, sub) <= tol * space.scale


def is_lagrangian(space: SympSpace, sub: Subspace, tol: float = TOL) -> bool:
    _check_sub(space, sub)
    return sub.dim == space.n and is_isotropic(space, sub, tol)


def is_antisymplectic(space: SympSpace, inv: LinInvolution, tol: float = TOL) -> bool:
    t = inv.tau
    if t.shape != space.omega.shape:
        raise DimensionMismatch("tau and omega have different shapes")
    resid = np.abs(t.T @ space.omega @ t + space.omega).max()
    return bool(resid <= tol * space.scale * max(1.0, np.abs(t).max()) ** 2)


def is_symplectic_map(space: SympSpace, phi, tol: float = TOL) -> bool:
    phi = np.asarray(phi)
    resid = np.abs(phi.T @ space.omega @ phi - space.omega).max()
    return bool(resid <= tol * space.scale * max(1.0, np.abs(phi).max()) ** 2)


def eigensplit(inv: LinInvolution) -> tuple[Subspace, Subspace]:
    t = inv.tau
    eye = np.eye(t.shape[0])
    cutoff = 1e-8 * max(1.0, np.abs(t).max())

    def image(m):
        u, sv, _ = np.linalg.svd(m)
        return u[:, : int(np.sum(sv > cutoff))]

    # the spectral projectors (I +- tau)/2 are exact for an involution
    v_plus = image((eye + t) / 2)
    v_minus = image((eye - t) / 2)
    if v_plus.shape[1] + v_minus.shape[1] != t.shape[0]:
        raise NotInvolution("eigenspaces do not span the ambient space")
    return Subspace(v_plus), Subspace(v_minus)


def _dual_basis(space: SympSpace, e, f):
    """Re-basis span(f) so that Omega(e_i, f_j) = delta_ij."""
    m = e.T @ space.omega @ f
    if np.linalg.matrix_rank(m, tol=1e-10 * max(1.0, np.abs(m).max())) < m.shape[0]:
        raise NotComplementary("the pairing between the two subspaces is degenerate")
    return f @ np.linalg.inv(m)


def _check_complementary(space: SympSpace, v_plus: Subspace, v_minus: Subspace):
    _check_sub(space, v_plus)
    _check_sub(space, v_minus)
    stacked = np.hstack([v_plus.orthonormal(), v_minus.orthonormal()])
    if v_plus.dim + v_minus.dim != space.dim or np.linalg.matrix_rank(stacked, tol=1e-10) < space.dim:
        raise NotComplementary("subspaces are not complementary")


def build_swap_symplectomorphism(space: SympSpace, v_plus: Subspace, v_minus: Subspace) -> np.ndarray:
    """phi(e_i) = f_i, phi(f_i) = -e_i for a basis e of V1 and its Omega-dual basis f of V-1."""
    for name, sub in (("V1", v_plus), ("V-1", v_minus)):
        _check_sub(space, sub)
        if not is_lagrangian(space, sub):
            raise NotLagrangian(f"{name} is not Lagrangian")
    _check_complementary(space, v_plus, v_minus)
    e = v_plus.basis
    f = _dual_basis(space, e, v_minus.basis)
    src = np.hstack([e, f])
    dst = np.hstack([f, -e])
    return dst @ np.linalg.inv(src)


def dual_pair_action(space: SympSpace, v_plus: Subspace, v_minus: Subspace, weights) -> np.ndarray:
    """X e_i = c_i f_i, X f_i = -c_i e_i for the dual bases of a complementary pair.

    When both subspaces are Lagrangian this is infinitesimally symplectic and
    anticommutes with the involution having these eigenspaces.
    """
    _check_complementary(space, v_plus, v_minus)
    c = np.asarray(weights, dtype=float)
    e = v_plus.basis
    f = _dual_basis(space, e, v_minus.basis)
    src = np.hstack([e, f])
    dst = np.hstack([f * c, -e * c])
    return dst @ np.linalg.inv(src)


# ---------------------------------------------------------------------------
# torus actions

def fixed_subspace(action: LinTorusAction, dim: int) -> Subspace:
    if not action.generators:
        return Subspace(np.eye(dim))
    stacked = np.vstack(action.generators)
    return Subspace(scipy.linalg.null_space(stacked, rcond=1e-10))


@dataclass
class ActionCheck:
    symplectic: bool
    commuting: bool
    anticommutes_with_tau: bool
    no_fixed_vectors: bool
    compact: bool

    @property
    def ok(self) -> bool:
        return all((self.symplectic, self.commuting, self.anticommutes_with_tau,
                    self.no_fixed_vectors, self.compact))


def _generates_compact(x, tol: float) -> bool:
    """Imaginary spectrum and diagonalizable: exp(tX) stays bounded."""
    scale = max(1.0, np.abs(x).max())
    w, v = np.linalg.eig(x)
    if np.abs(w.real).max(initial=0.0) > 1e-8 * scale:
        return False
    return bool(np.linalg.cond(v) < 1e8)


def check_action(space: SympSpace, inv: LinInvolution, action: LinTorusAction, tol: float = TOL) -> ActionCheck:
    gens = action.generators
    if any(x.shape != space.omega.shape for x in gens):
        raise DimensionMismatch("generator shape differs from omega")
    w, t = space.omega, inv.tau

    def small(m, x):
        return np.abs(m).max(initial=0.0) <= tol * max(1.0, np.abs(x).max()) * max(space.scale, np.abs(t).max())

    return ActionCheck(
        symplectic=all(small(x.T @ w + w @ x, x) for x in gens),
        commuting=all(small(a @ b - b @ a, a @ b) for a in gens for b in gens),
        anticommutes_with_tau=all(small(t @ x + x @ t, x) for x in gens),
        no_fixed_vectors=bool(gens) and fixed_subspace(action, space.dim).dim == 0,
        compact=all(_generates_compact(x, tol) for x in gens),
    )


# ---------------------------------------------------------------------------
# equivalence report

@dataclass
class EquivalenceReport:
    s1_antisymplectic: bool
    s2_both_lagrangian: bool
    s3_swap_exists: bool
    s4_action: bool | None
    v_plus_dim: int
    v_minus_dim: int
    notes: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        vals = [self.s1_antisymplectic, self.s2_both_lagrangian, self.s3_swap_exists]
        if self.s4_action is not None:
            vals.append(self.s4_action)
        return len(set(vals)) == 1

    def to_dict(self) -> dict:
        return {"s1": self.s1_antisymplectic, "s2": self.s2_both_lagrangian,
                "s3": self.s3_swap_exists, "s4": self.s4_action,
                "dim_v_plus": self.v_plus_dim, "dim_v_minus": self.v_minus_dim,
                "consistent": self.consistent, "notes": list(self.notes)}


def check_involution_equivalences(space: SympSpace, inv: LinInvolution,
                                  action: LinTorusAction | None = None) -> EquivalenceReport:
    """Evaluate the four statements independently.

    (3) is evaluated with the canonical dual-basis swap only, and (4) only for
    a supplied action; neither existence claim is searched for.
    """
    v_plus, v_minus = eigensplit(inv)
    s1 = is_antisymplectic(space, inv)
    plus_lag = is_lagrangian(space, v_plus)
    s2 = plus_lag and is_lagrangian(space, v_minus)
    notes = []

    s3 = False
    if plus_lag:
        try:
            e = v_plus.basis
            f = _dual_basis(space, e, v_minus.basis)
            phi = np.hstack([f, -e]) @ np.linalg.inv(np.hstack([e, f]))
            s3 = (is_symplectic_map(space, phi)
                  and subspace_equal(Subspace(phi @ v_plus.basis), v_minus)
                  and subspace_equal(Subspace(phi @ v_minus.basis), v_plus))
            if not s3:
                notes.append("canonical swap is not symplectic")
        except NotComplementary:
            notes.append("V1 and V-1 are not dually paired")
    s4 = None
    if action is not None:
        chk = check_action(space, inv, action)
        s4 = plus_lag and chk.ok
        if not chk.ok:
            notes.append("supplied action fails: " + ", ".join(
                k for k, v in vars(chk).items() if not v))
    return EquivalenceReport(s1, s2, s3, s4, v_plus.dim, v_minus.dim, notes)


# ---------------------------------------------------------------------------
# random instances

def random_symplectic_form(rng, n: int) -> np.ndarray:
    """omega = A^T J A with A well conditioned (singular values in [0.5, 2])."""
    u = np.linalg.qr(rng.standard_normal((2 * n, 2 * n)))[0]
    v = np.linalg.qr(rng.standard_normal((2 * n, 2 * n)))[0]
    a = u @ np.diag(rng.uniform(0.5, 2.0, 2 * n)) @ v
    j = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])
    return a.T @ j @ a


def darboux_frame(omega, rng=None) -> tuple[np.ndarray, np.ndarray]:
    """Symplectic Gram-Schmidt: columns e_i, f_i with Omega(e_i, f_j) = delta_ij,
    Omega(e_i, e_j) = Omega(f_i, f_j) = 0."""
    omega = np.asarray(omega, dtype=float)
    d = omega.shape[0]
    pool = list((rng.standard_normal((d, d)) if rng is not None else np.eye(d)).T)
    es, fs = [], []
    while pool:
        e = pool.pop(0)
        pairings = [abs(e @ omega @ w) for w in pool]
        j = int(np.argmax(pairings))
        w = pool.pop(j)
        f = w / (e @ omega @ w)
        es.append(e)
        fs.append(f)
        pool = [u - (u @ omega @ f) * e + (u @ omega @ e) * f for u in pool]
    return np.array(es).T, np.array(fs).T


INSTANCE_KINDS = ("antisymplectic", "minus_not_lagrangian", "plus_not_lagrangian",
                  "identity", "minus_identity")


@dataclass
class Instance:
    kind: str
    space: SympSpace
    inv: LinInvolution
    action: LinTorusAction | None

    def to_json(self) -> str:
        return json.dumps(instance_to_dict(self))


def instance_to_dict(inst: Instance) -> dict:
    return {"kind": inst.kind, "omega": inst.space.omega.tolist(), "tau": inst.inv.tau.tolist(),
            "generators": [x.tolist() for x in (inst.action.generators if inst.action else ())]}


def instance_from_dict(d: dict) -> Instance:
    gens = d.get("generators")
    return Instance(d.get("kind", "user"), SympSpace(np.array(d["omega"], dtype=float)),
                    LinInvolution(np.array(d["tau"], dtype=float)),
                    LinTorusAction(tuple(np.array(g, dtype=float) for g in gens)) if gens else None)


def _mix(rng, basis):
    """Random change of basis inside the span (keeps the subspace)."""
    k = basis.shape[1]
    q = np.linalg.qr(rng.standard_normal((k, k)))[0]
    return basis @ (q * rng.uniform(0.5, 2.0, k))


def random_instance(rng, n: int, kind: str) -> Instance:
    omega = random_symplectic_form(rng, n)
    space = SympSpace(omega)
    d = 2 * n
    if kind == "identity":
        return Instance(kind, space, LinInvolution(np.eye(d)), None)
    if kind == "minus_identity":
        return Instance(kind, space, LinInvolution(-np.eye(d)), None)
    e, f = darboux_frame(omega, rng)
    s = rng.standard_normal((n, n)) * 0.5
    if kind == "antisymplectic":
        s = (s + s.T) / 2
        plus, minus = e, f + e @ s
    elif kind == "minus_not_lagrangian":
        s = s - s.T
        if n == 1:
            # every line in R^2 is Lagrangian; use an uneven split instead
            plus, minus = np.hstack([e, f]), np.zeros((d, 0))
        else:
            plus, minus = e, f + e @ s
    elif kind == "plus_not_lagrangian":
        if n == 1:
            plus, minus = np.zeros((d, 0)), np.hstack([e, f])
        else:
            # e_1 and f_1 both in V1: not isotropic
            plus = np.hstack([e[:, :-1], f[:, :1]])
            minus = np.hstack([f[:, 1:], e[:, -1:]]) + plus @ rng.standard_normal((n, n)) * 0.3
    else:
        raise ValueError(f"unknown instance kind {kind!r}")
    if plus.shape[1]:
        plus = _mix(rng, plus)
    if minus.shape[1]:
        minus = _mix(rng, minus)
    b = np.hstack([plus, minus])
    sign = np.concatenate([np.ones(plus.shape[1]), -np.ones(minus.shape[1])])
    tau = b @ np.diag(sign) @ np.linalg.inv(b)
    inv = LinInvolution(tau)
    action = None
    if plus.shape[1] == n and minus.shape[1] == n:
        # the canonical candidate action; it is valid exactly when V-1 is Lagrangian
        try:
            gens = [dual_pair_action(space, Subspace(plus), Subspace(minus), rng.uniform(0.5, 2.0, n))]
            if n > 1:
                gens.append(dual_pair_action(space, Subspace(plus), Subspace(minus),
                                             rng.uniform(-1.0, 1.0, n)))
            action = LinTorusAction(tuple(gens))
        except NotComplementary:
            action = None
    return Instance(kind, space, inv, action)


def equivalence_suite(count: int = 200, seed: int = 0, dims=(2, 4, 6, 8, 10)) -> dict:
    """Random instances cycling through dimensions and kinds; reports inconsistencies."""
    rng = np.random.default_rng([seed, 212])
    failures = []
    tally = {k: 0 for k in INSTANCE_KINDS}
    for i in range(count):
        d = dims[i % len(dims)]
        kind = INSTANCE_KINDS[(i // len(dims)) % len(INSTANCE_KINDS)]
        inst = random_instance(rng, d // 2, kind)
        rep = check_involution_equivalences(inst.space, inst.inv, inst.action)
        expected = kind == "antisymplectic"
        tally[kind] += 1
        if not rep.consistent or rep.s1_antisymplectic != expected:
            failures.append({"index": i, "dim": d, "kind": kind, **rep.to_dict()})
    return {"count": count, "seed": seed, "kinds": tally, "inconsistencies": len(failures),
            "failures": failures[:10], "pass": not failures}
