"""Monte-Carlo check that ``log a~(K exp Y)`` is the convex hull of the Weyl orbit of Y.

Also compares the sampled images of the real and complex leaves through a
point ``a`` of A.  Points are expressed in a-coordinates:

* SL families: the first ``n - 1`` diagonal entries (basis ``E_ii - E_nn``);
* SO(1, n) families: the coefficient of ``E_{1,n+1} + E_{n+1,1}``.

Distances, coverage gaps and Hausdorff distances are Euclidean in these
coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import DimensionMismatch, RankTooLarge
from .geomcone import Polytope, convex_hull, hausdorff, max_violation, shrink
from .iwasawa import log_a_batch, weyl_vertex_errors
from .liecore import GroupFamily, make_family, weyl_group
from .numkit import mat_exp

BATCH = 10_000
TOL_IN = 1e-9
TOL_V = 1e-9
SHRINK = 0.9


def default_gap(rank: int) -> float:
    return 0.05 if rank == 1 else 0.1


def parse_a_coords(fam: GroupFamily, values) -> np.ndarray:
    """Accept a-coordinates, or for SL families all ``n`` diagonal entries (summing to 0)."""
    v = np.atleast_1d(np.asarray(values, dtype=float))
    if v.shape == (fam.rank,):
        return v
    if fam.real_name.startswith("sl") and v.shape == (fam.rep_dim,):
        if abs(v.sum()) > 1e-12 * max(1.0, np.abs(v).max()):
            raise DimensionMismatch("diagonal entries must sum to zero")
        return v[:-1].copy()
    raise DimensionMismatch(f"{fam.name}: expected {fam.rank} a-coordinates"
                            + (f" or {fam.rep_dim} diagonal entries" if fam.real_name.startswith("sl") else ""))


def sample_compact(fam: GroupFamily, n: int, seed: int = 0, unitary: bool = False) -> np.ndarray:
    """Haar samples of K (or U), drawn in batches keyed by ``(seed, batch index)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out = []
    for idx, start in enumerate(range(0, n, BATCH)):
        rng = np.random.default_rng([seed, idx])
        count = min(BATCH, n - start)
        out.append(fam.haar_u(rng, count) if unitary else fam.haar_k(rng, count))
    return np.concatenate(out)


def weyl_orbit(fam: GroupFamily, y) -> np.ndarray:
    return weyl_group(fam).orbit(np.atleast_1d(np.asarray(y, dtype=float)))


def iwasawa_image(fam: GroupFamily, ks, g) -> np.ndarray:
    """``log a~(k g)`` for a stack of ``k``."""
    out = []
    for start in range(0, len(ks), BATCH):
        out.append(log_a_batch(fam, ks[start:start + BATCH] @ g))
    return np.concatenate(out)


def coverage_gap(hull: Polytope, points, spacing: float, factor: float = SHRINK) -> float:
    """Largest distance from a grid node of the shrunk hull to the nearest sample."""
    inner = shrink(hull, factor)
    lo = inner.vertices.min(axis=0)
    hi = inner.vertices.max(axis=0)
    axes = [np.arange(a, b + spacing / 2, spacing) if b > a else np.array([a]) for a, b in zip(lo, hi)]
    nodes = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, hull.dim)
    inside = (nodes @ inner.normals.T - inner.offsets).max(axis=1, initial=-np.inf) <= 1e-12
    nodes = np.vstack([nodes[inside], inner.vertices])
    dist, _ = cKDTree(np.asarray(points).reshape(-1, hull.dim)).query(nodes)
    return float(dist.max())


@dataclass
class KostantReport:
    family: str
    Y: list
    n_samples: int
    seed: int
    containment_max_violation: float
    worst_sample_index: int
    vertex_errors: dict
    coverage_max_gap: float
    tol_in: float
    tol_v: float
    gap_max: float
    orbit: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (self.containment_max_violation <= self.tol_in
                and all(e <= self.tol_v for e in self.vertex_errors.values())
                and self.coverage_max_gap <= self.gap_max)

    def to_dict(self) -> dict:
        return {"family": self.family, "Y": self.Y, "n_samples": self.n_samples, "seed": self.seed,
                "orbit": self.orbit, "containment_max_violation": self.containment_max_violation,
                "worst_sample_index": self.worst_sample_index, "vertex_errors": self.vertex_errors,
                "coverage_max_gap": self.coverage_max_gap, "tol_in": self.tol_in, "tol_v": self.tol_v,
                "gap_max": self.gap_max, "pass": self.passed}


def verify_kostant(fam: GroupFamily | str, y, n_samples: int = 10_000, seed: int = 0,
                   tol_in: float = TOL_IN, tol_v: float = TOL_V, gap_max: float | None = None,
                   return_points: bool = False):
    fam = make_family(fam) if isinstance(fam, str) else fam
    if fam.rank > 3:
        raise RankTooLarge(f"{fam.name} has rank {fam.rank} > 3")
    if n_samples < 10:
        raise ValueError("n_samples must be >= 10")
    y = parse_a_coords(fam, y)
    gap_max = default_gap(fam.rank) if gap_max is None else gap_max
    orbit = weyl_orbit(fam, y)
    hull = convex_hull(orbit)
    ks = sample_compact(fam, n_samples, seed)
    pts = iwasawa_image(fam, ks, mat_exp(fam.a_matrix(y)).astype(fam.dtype))
    viol, idx = max_violation(hull, pts)
    verrs = {f"w{i}": e for i, e in enumerate(weyl_vertex_errors(fam, y))}
    gap = coverage_gap(hull, pts, gap_max / 2) if len(orbit) > 1 else 0.0
    report = KostantReport(fam.name, y.tolist(), n_samples, seed, viol, idx, verrs, gap,
                           tol_in, tol_v, gap_max, orbit.tolist())
    return (report, pts) if return_points else report


def closed_form_sl2(theta, t):
    """``log a~(k_theta exp(t diag(1, -1)))`` for the rotation ``k_theta`` by angle theta."""
    theta = np.asarray(theta, dtype=float)
    return -0.5 * np.log(np.sin(theta) ** 2 * np.exp(2 * t) + np.cos(theta) ** 2 * np.exp(-2 * t))


def rotation(theta) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)


# ---------------------------------------------------------------------------
# real versus complex leaf images

@dataclass
class LeafEqualityReport:
    family: str
    log_a: list
    n_samples: int
    seed: int
    hausdorff: float
    real_violation: float
    complex_violation: float
    gap_max: float
    tol_in: float
    real_hull: list
    complex_hull: list

    @property
    def passed(self) -> bool:
        return (self.hausdorff <= self.gap_max and self.real_violation <= self.tol_in
                and self.complex_violation <= self.tol_in)

    def to_dict(self) -> dict:
        return {"family": self.family, "log_a": self.log_a, "n_samples": self.n_samples,
                "seed": self.seed, "hausdorff": self.hausdorff, "real_violation": self.real_violation,
                "complex_violation": self.complex_violation, "gap_max": self.gap_max,
                "tol_in": self.tol_in, "real_hull": self.real_hull,
                "complex_hull": self.complex_hull, "pass": self.passed}


def verify_leaf_equality(leaf, n_samples: int = 10_000, seed: int = 0,
                         gap_max: float | None = None, tol_in: float = TOL_IN) -> LeafEqualityReport:
    """Hulls of the momentum images of the real points ``b(K a)`` and the whole leaf ``b(U a)``."""
    fam = leaf.fam
    if fam.rank > 2:
        raise RankTooLarge(f"{fam.name} has rank {fam.rank} > 2")
    gap_max = default_gap(fam.rank) if gap_max is None else gap_max
    a = leaf.a
    real_pts = iwasawa_image(fam, sample_compact(fam, n_samples, seed), a)
    cplx_pts = iwasawa_image(fam, sample_compact(fam, n_samples, seed + 1, unitary=True), a)
    target = convex_hull(weyl_orbit(fam, leaf.log_a))
    hq, hm = convex_hull(real_pts), convex_hull(cplx_pts)
    return LeafEqualityReport(
        fam.name, leaf.log_a.tolist(), n_samples, seed, hausdorff(hq, hm),
        max_violation(target, real_pts)[0], max_violation(target, cplx_pts)[0],
        gap_max, tol_in, hq.vertices.tolist(), hm.vertices.tolist())


def write_points_csv(path, points):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] == 1 and points.shape[1] > 3:
        points = points.T
    header = ",".join(f"x{i + 1}" for i in range(points.shape[1]))
    with open(path, "w", encoding="ascii") as fh:
        fh.write(header + "\n")
        for row in points:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")
