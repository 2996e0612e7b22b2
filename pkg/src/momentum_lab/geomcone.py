"""Finitely generated cones, dual cones, convex hulls and membership tests.

Everything here is low-dimensional (cones in R^d with d <= 4, polytopes in
R^r with r <= 3) and dense.  Dual cones are computed with the double
description method; membership in a cone is a phase-one simplex feasibility
problem.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, DimensionTooLarge, EmptyInput

MAX_CONE_DIM = 4
MEMBERSHIP_TOL = 1e-9
HULL_TOL = 1e-10


@dataclass(frozen=True)
class Cone:
    dim: int
    generators: np.ndarray = field(repr=False)

    def __init__(self, dim, generators=()):
        gens = np.asarray(generators, dtype=float).reshape(-1, dim) if len(generators) else np.zeros((0, dim))
        keep = np.linalg.norm(gens, axis=1) > 0
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "generators", gens[keep])

    @classmethod
    def from_generators(cls, generators):
        gens = np.atleast_2d(np.asarray(generators, dtype=float))
        return cls(gens.shape[1], gens)

    def is_zero(self) -> bool:
        return len(self.generators) == 0

    def to_dict(self):
        return {"dim": self.dim, "generators": self.generators.tolist()}


@dataclass(frozen=True)
class Polytope:
    dim: int
    vertices: np.ndarray
    normals: np.ndarray  # (F, dim), unit rows
    offsets: np.ndarray  # (F,) with facets <n, x> <= c
    degenerate: bool = False

    @property
    def facets(self):
        return list(zip(self.normals, self.offsets))

    def centroid(self):
        return self.vertices.mean(axis=0)

    def to_dict(self):
        return {"dim": self.dim, "vertices": self.vertices.tolist(),
                "facets": [{"normal": n.tolist(), "offset": float(c)} for n, c in self.facets],
                "degenerate": self.degenerate}


# ---------------------------------------------------------------------------
# dual cones by double description

def _orthonormal_rows(m, tol=1e-12):
    if len(m) == 0:
        return m
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    return vt[s > tol * max(1.0, s[0])]


def _halfspaces_to_generators(constraints, dim, tol=1e-10):
    """Generators of {x : A x >= 0} as (rays, lineality basis)."""
    lin = np.eye(dim)
    rays = np.zeros((0, dim))
    done = []
    for a in constraints:
        a = a / np.linalg.norm(a)
        if len(lin):
            al = lin @ a
            j = int(np.argmax(np.abs(al)))
            if abs(al[j]) > tol:
                l0 = lin[j] * np.sign(al[j])
                rest = np.delete(lin, j, axis=0)
                rest = rest - np.outer(rest @ a / (l0 @ a), l0)
                rays = rays - np.outer(rays @ a / (l0 @ a), l0)
                rays = np.vstack([rays, l0])
                lin = _orthonormal_rows(rest)
                done.append(a)
                continue
        vals = rays @ a
        pos, neg = vals > tol, vals < -tol
        zero = ~pos & ~neg
        new = []
        if neg.any() and pos.any():
            eff_dim = dim - len(lin)
            tight = np.abs(np.array(done) @ rays.T) <= tol if done else np.zeros((0, len(rays)), bool)
            for i in np.flatnonzero(pos):
                for k in np.flatnonzero(neg):
                    common = tight[:, i] & tight[:, k]
                    rows = np.array(done)[common] if common.any() else np.zeros((0, dim))
                    rank = np.linalg.matrix_rank(rows, tol=1e-9) if len(rows) else 0
                    if rank == eff_dim - 2:
                        r = vals[i] * rays[k] - vals[k] * rays[i]
                        new.append(r / np.linalg.norm(r))
        rays = np.vstack([rays[pos | zero]] + ([np.array(new)] if new else []))
        done.append(a)
    return rays, lin


def _normalize_rays(rays, lin, tol=1e-9):
    if len(lin):
        rays = rays - (rays @ lin.T) @ lin
    out = []
    for r in rays:
        nr = np.linalg.norm(r)
        if nr <= tol:
            continue
        r = r / nr
        if not any(np.abs(r - q).max() <= tol for q in out):
            out.append(r)
    return np.array(out).reshape(-1, rays.shape[1])


def dual_cone(c: Cone) -> Cone:
    """C* = {lambda : <lambda, g> >= 0 for all generators g}."""
    if c.dim > MAX_CONE_DIM:
        raise DimensionTooLarge(f"dual cones supported for d <= {MAX_CONE_DIM}, got {c.dim}")
    rays, lin = _halfspaces_to_generators(c.generators, c.dim)
    rays = _normalize_rays(rays, lin)
    gens = [rays] + ([lin, -lin] if len(lin) else [])
    return Cone(c.dim, np.vstack(gens) if len(np.vstack(gens)) else np.zeros((0, c.dim)))


def cone_is_full(c: Cone) -> bool:
    return dual_cone(c).is_zero()


# ---------------------------------------------------------------------------
# membership by phase-one simplex

def _phase_one(a_eq, b, tol=1e-12, max_iter=500):
    """Phase-one simplex (Bland rule); returns the nonnegative s minimizing the infeasibility."""
    m, n = a_eq.shape
    a_eq = a_eq.copy()
    b = b.copy()
    neg = b < 0
    a_eq[neg] *= -1
    b[neg] *= -1
    tab = np.hstack([a_eq, np.eye(m), b[:, None]])
    basis = list(range(n, n + m))
    cost = np.concatenate([np.zeros(n), np.ones(m)])
    for _ in range(max_iter):
        cb = cost[basis]
        reduced = cost - cb @ tab[:, :-1]
        entering = next((j for j in range(n + m) if reduced[j] < -tol), None)  # Bland
        if entering is None:
            break
        col = tab[:, entering]
        ratios = [(tab[i, -1] / col[i], basis[i], i) for i in range(m) if col[i] > tol]
        if not ratios:
            break
        _, _, row = min(ratios)
        tab[row] /= tab[row, entering]
        for i in range(m):
            if i != row:
                tab[i] -= tab[i, entering] * tab[row]
        basis[row] = entering
    s = np.zeros(n + m)
    for i, j in enumerate(basis):
        s[j] = tab[i, -1]
    return np.maximum(s[:n], 0.0)


def cone_membership(point, c: Cone, tol: float = MEMBERSHIP_TOL) -> bool:
    point = np.asarray(point, dtype=float)
    if c.dim > MAX_CONE_DIM:
        raise DimensionTooLarge(f"membership supported for d <= {MAX_CONE_DIM}, got {c.dim}")
    if point.shape != (c.dim,):
        raise DimensionMismatch(f"point has shape {point.shape}, cone lives in R^{c.dim}")
    norm = np.linalg.norm(point)
    if norm <= tol:
        return True
    if c.is_zero():
        return False
    gens = c.generators / np.linalg.norm(c.generators, axis=1, keepdims=True)
    target = point / norm
    s = _phase_one(gens.T, target)
    return bool(np.linalg.norm(gens.T @ s - target) <= tol)


# ---------------------------------------------------------------------------
# convex hulls

def _hull_1d(x):
    lo, hi = float(x.min()), float(x.max())
    verts = np.array([[lo], [hi]]) if hi - lo > HULL_TOL * max(1.0, abs(lo), abs(hi)) else np.array([[lo]])
    normals = np.array([[-1.0], [1.0]])
    offsets = np.array([-lo, hi])
    return verts, normals, offsets


def _cross2(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def monotone_chain(points, tol=HULL_TOL):
    """Strict convex hull of 2-d points in counter-clockwise order (Andrew's algorithm)."""
    pts = sorted(set(map(tuple, np.asarray(points, dtype=float))))
    if len(pts) <= 2:
        return np.array(pts)
    scale = max(1.0, float(np.abs(np.asarray(pts)).max()))

    def half(seq):
        chain = []
        for p in seq:
            while len(chain) >= 2 and _cross2(chain[-2], chain[-1], p) <= tol * scale * scale:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    return np.array(lower[:-1] + upper[:-1])


def _hull_2d(pts):
    verts = monotone_chain(pts)
    normals, offsets = [], []
    for i in range(len(verts)):
        p, q = verts[i], verts[(i + 1) % len(verts)]
        e = q - p
        n = np.array([e[1], -e[0]])
        n /= np.linalg.norm(n)
        normals.append(n)
        offsets.append(n @ p)
    return verts, np.array(normals), np.array(offsets)


def _hull_3d(pts):
    """Exhaustive supporting-plane enumeration; fine for the few dozen points of a Weyl orbit."""
    scale = max(1.0, float(np.abs(pts).max()))
    tol = HULL_TOL * scale
    planes = []
    for i, j, k in itertools.combinations(range(len(pts)), 3):
        n = np.cross(pts[j] - pts[i], pts[k] - pts[i])
        nn = np.linalg.norm(n)
        if nn <= tol * scale:
            continue
        n /= nn
        side = pts @ n - n @ pts[i]
        if np.all(side <= tol):
            pass
        elif np.all(side >= -tol):
            n = -n
        else:
            continue
        c = n @ pts[i]
        if not any(np.abs(n - m).max() <= 1e-9 and abs(c - d) <= 1e-9 * scale for m, d in planes):
            planes.append((n, c))
    verts = []
    for n, c in planes:
        on = pts[np.abs(pts @ n - c) <= tol]
        # 2-d hull of the facet in an in-plane frame
        u = np.linalg.svd(np.eye(3) - np.outer(n, n))[0][:, :2]
        local = on @ u
        for v in monotone_chain(local):
            idx = np.flatnonzero(np.abs(local - v).max(axis=1) <= 1e-12 * scale)
            p = on[idx[0]]
            if not any(np.abs(p - q).max() <= tol for q in verts):
                verts.append(p)
    normals = np.array([n for n, _ in planes])
    offsets = np.array([c for _, c in planes])
    return np.array(verts), normals, offsets


def convex_hull(points) -> Polytope:
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise EmptyInput("convex hull of an empty point set")
    if pts.ndim == 1:
        pts = pts[:, None]
    r = pts.shape[1]
    if r not in (1, 2, 3):
        raise DimensionMismatch(f"convex hulls supported in dimension 1..3, got {r}")
    center = pts.mean(axis=0)
    centered = pts - center
    scale = max(1.0, float(np.abs(pts).max()))
    # thin SVD when there are at least r points; vt is then r x r
    _, s, vt = np.linalg.svd(centered, full_matrices=len(pts) < r)
    aff = int(np.sum(s > HULL_TOL * scale))
    if aff == r:
        builder = {1: _hull_1d, 2: _hull_2d, 3: _hull_3d}[r]
        if r == 1:
            verts, normals, offsets = builder(pts[:, 0])
        else:
            verts, normals, offsets = builder(pts)
        return Polytope(r, verts, normals, offsets, degenerate=False)
    # lower-dimensional input: hull inside the affine span, plus equality constraints
    span = vt[:aff]
    comp = vt[aff:]
    if aff == 0:
        verts = center[None, :]
        normals, offsets = np.zeros((0, r)), np.zeros(0)
    else:
        local = centered @ span.T
        inner = convex_hull(local)
        verts = inner.vertices @ span + center
        normals = inner.normals @ span
        offsets = inner.offsets + normals @ center
    eq_n = np.vstack([comp, -comp])
    eq_c = eq_n @ center
    return Polytope(r, verts, np.vstack([normals, eq_n]), np.concatenate([offsets, eq_c]), degenerate=True)


def polytope_contains(p: Polytope, x, tol: float = MEMBERSHIP_TOL):
    """(inside, violation) with violation = max over facets of <n, x> - c."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (p.dim,):
        raise DimensionMismatch(f"point dimension {x.shape} does not match polytope dimension {p.dim}")
    viol = x @ p.normals.T - p.offsets
    v = viol.max(axis=-1)
    return v <= tol, v


def max_violation(p: Polytope, xs):
    """Largest facet violation over a stack of points and the index where it occurs."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    viol = (xs @ p.normals.T - p.offsets).max(axis=1)
    i = int(np.argmax(viol))
    return float(viol[i]), i


def shrink(p: Polytope, factor: float) -> Polytope:
    c = p.centroid()
    return convex_hull(c + factor * (p.vertices - c))


def point_polytope_distance(p: Polytope, x) -> float:
    """Euclidean distance from ``x`` to a polytope of dimension <= 2 (0 if inside)."""
    x = np.asarray(x, dtype=float)
    inside, _ = polytope_contains(p, x, tol=1e-12)
    if inside:
        return 0.0
    v = p.vertices
    if p.dim == 1:
        return float(max(v.min() - x[0], x[0] - v.max(), 0.0))
    if len(v) == 1:
        return float(np.linalg.norm(x - v[0]))
    best = np.inf
    for i in range(len(v)):
        a, b = v[i], v[(i + 1) % len(v)]
        ab = b - a
        t = np.clip((x - a) @ ab / (ab @ ab), 0.0, 1.0)
        best = min(best, float(np.linalg.norm(a + t * ab - x)))
    return best


def hausdorff(p: Polytope, q: Polytope) -> float:
    """Hausdorff distance between two convex polytopes (attained at vertices)."""
    if p.dim == 1:
        lo_p, hi_p = p.vertices.min(), p.vertices.max()
        lo_q, hi_q = q.vertices.min(), q.vertices.max()
        return float(max(abs(lo_p - lo_q), abs(hi_p - hi_q)))
    d1 = max(point_polytope_distance(q, v) for v in p.vertices)
    d2 = max(point_polytope_distance(p, v) for v in q.vertices)
    return max(d1, d2)


# ---------------------------------------------------------------------------
# random cones and the duality suite

def random_cone(rng, dim: int) -> Cone:
    count = int(rng.integers(1, 2 * dim + 2))
    return Cone(dim, rng.standard_normal((count, dim)))


def planted_full_cone(rng, dim: int) -> Cone:
    """Spanning generators plus one that makes a strictly positive combination vanish."""
    gens = rng.standard_normal((dim, dim))
    v = rng.uniform(0.5, 1.5, dim)
    last = -(v @ gens)
    extra = rng.standard_normal((int(rng.integers(0, 3)), dim))
    return Cone(dim, np.vstack([gens, last, extra]))


def planted_pointed_cone(rng, dim: int) -> Cone:
    """Generators strictly inside the half-space <h, x> > 0, so h lies in the dual."""
    h = rng.standard_normal(dim)
    h /= np.linalg.norm(h)
    gens = rng.standard_normal((int(rng.integers(1, 2 * dim + 2)), dim))
    gens -= np.outer(gens @ h, h)
    gens += np.outer(rng.uniform(0.2, 1.0, len(gens)), h)
    return Cone(dim, gens)


def bidual_mismatch(c: Cone, tol: float = MEMBERSHIP_TOL) -> int:
    """Number of generators of C not in C** plus generators of C** not in C."""
    cc = dual_cone(dual_cone(c))
    bad = sum(not cone_membership(g, cc, tol) for g in c.generators)
    bad += sum(not cone_membership(g, c, tol) for g in cc.generators)
    return bad


def cone_duality_suite(per_dim: int = 100, seed: int = 0, dims=(2, 3, 4)) -> dict:
    rng = np.random.default_rng([seed, 3])
    bidual_fail = []
    full_fail = []
    for d in dims:
        for i in range(per_dim):
            c = random_cone(rng, d)
            if bidual_mismatch(c):
                bidual_fail.append({"dim": d, "index": i, "generators": c.generators.tolist()})
        for i in range(per_dim // 2):
            if not cone_is_full(planted_full_cone(rng, d)):
                full_fail.append({"dim": d, "index": i, "planted": "full"})
            if cone_is_full(planted_pointed_cone(rng, d)):
                full_fail.append({"dim": d, "index": i, "planted": "pointed"})
    return {"per_dim": per_dim, "dims": list(dims), "bidual_failures": len(bidual_fail),
            "fullness_failures": len(full_fail), "examples": (bidual_fail + full_fail)[:3],
            "pass": not bidual_fail and not full_fail}
