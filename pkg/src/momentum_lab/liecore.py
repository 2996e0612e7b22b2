"""Concrete semisimple structure data for the supported matrix families.

Supported names::

    sl2r sl3r sl4r      SL(n, R),    K = SO(n)
    so12 so13 so14      SO_e(1, n),  K = SO(n) acting on the last n coordinates
    sl2c sl3c           SL(n, C) over the real form SL(n, R),  U = SU(n)
    so5c                SO(5, C) over the real form SO_e(1, 4)

Every family carries its real form's Cartan data (bases of k, p, a, n, m and a
maximal torus t1 of m).  Complexified families additionally carry n1 = n_C + n_plus
and the compact real form u = k + i p.  ``adapted_change`` is a unitary matrix
whose columns form a basis in which a + i t1 is diagonal (weights in
lexicographically decreasing order) and n1 is strictly upper triangular.

Coordinates on a are always taken with respect to ``basis_a``.  For SL(n) the
basis is ``E_ii - E_nn`` (i < n), so the coordinates are the first n-1 diagonal
entries; for SO_e(1, n) it is the single generator ``E_{1,n+1} + E_{n+1,1}``.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import GenericityFailure, NotInAlgebra, UnsupportedFamily
from .numkit import haar_orthogonal, haar_unitary

FAMILY_NAMES = ("sl2r", "sl3r", "sl4r", "so12", "so13", "so14", "sl2c", "sl3c", "so5c")
REAL_FORM = {"sl2c": "sl2r", "sl3c": "sl3r", "so5c": "so14"}
COMPLEXIFICATION = {v: k for k, v in REAL_FORM.items()}


def _unit(n, i, j, dtype=float):
    m = np.zeros((n, n), dtype=dtype)
    m[i, j] = 1
    return m


def _frozen(mats):
    out = []
    for m in mats:
        m = np.array(m)
        m.setflags(write=False)
        out.append(m)
    return tuple(out)


def _vec(z):
    z = np.asarray(z)
    return np.concatenate([z.real.ravel(), z.imag.ravel()])


class BasisExpander:
    """Real-linear coordinates of matrices with respect to a list of (real or complex) basis matrices."""

    def __init__(self, basis):
        self.basis = tuple(basis)
        self.matrix = np.array([_vec(b) for b in self.basis]).T
        self.pinv = np.linalg.pinv(self.matrix)

    def coords(self, z):
        return self.pinv @ _vec(z)

    def residual(self, z, c=None):
        if c is None:
            c = self.coords(z)
        return float(np.abs(self.matrix @ c - _vec(z)).max(initial=0.0))

    def combine(self, c):
        n = self.basis[0].shape[0]
        dtype = complex if any(np.iscomplexobj(b) for b in self.basis) else float
        out = np.zeros((n, n), dtype=dtype)
        for ci, b in zip(c, self.basis):
            out = out + ci * b
        return out


@dataclass(frozen=True, eq=False)
class GroupFamily:
    name: str
    rep_dim: int
    complexified: bool
    real_name: str
    form: np.ndarray | None  # eta with g^T eta g = eta for SO families
    basis_k: tuple
    basis_p: tuple
    basis_a: tuple
    basis_n: tuple
    basis_m: tuple
    basis_t1: tuple
    basis_nplus: tuple
    adapted_change: np.ndarray
    h_dominant: np.ndarray  # a-coordinates of a regular element defining the positive system
    weyl_reps: tuple  # representatives k_w in K

    @property
    def rank(self) -> int:
        return len(self.basis_a)

    @property
    def dtype(self):
        return complex if self.complexified else float

    # --- a-coordinates -----------------------------------------------------
    def a_matrix(self, coords):
        coords = np.atleast_1d(np.asarray(coords, dtype=float))
        if coords.shape != (self.rank,):
            raise ValueError(f"{self.name}: expected {self.rank} a-coordinates, got {coords.shape}")
        return sum(c * h for c, h in zip(coords, self.basis_a))

    @functools.cached_property
    def trace_gram(self):
        return np.array([[np.trace(x @ y).real for y in self.basis_a] for x in self.basis_a])

    # --- algebra bases -------------------------------------------------------
    @functools.cached_property
    def real_algebra_basis(self):
        """Real basis of the real form g = k + p."""
        return self.basis_k + self.basis_p

    @functools.cached_property
    def basis_u(self):
        return self.basis_k + tuple(1j * p for p in self.basis_p)

    @functools.cached_property
    def basis_n1(self):
        return tuple(np.asarray(x, dtype=complex) for x in self.basis_n) + self.basis_nplus

    @functools.cached_property
    def iwasawa_algebra_bases(self):
        """Real bases (nilpotent, abelian, compact) with g = n + a + k (real) or g_C = n1 + a1 + u."""
        if not self.complexified:
            return self.basis_n, self.basis_a, self.basis_k
        n1 = tuple(b for x in self.basis_n1 for b in (x, 1j * x))
        a1 = tuple(np.asarray(h, dtype=complex) for h in self.basis_a) + tuple(1j * t for t in self.basis_t1)
        return n1, a1, self.basis_u

    @functools.cached_property
    def _iwasawa_expander(self):
        nb, ab, cb = self.iwasawa_algebra_bases
        return BasisExpander(nb + ab + cb), (len(nb), len(ab), len(cb))

    # --- diagonal bookkeeping in the adapted basis ---------------------------
    def to_adapted(self, g):
        c = self.adapted_change
        return c.conj().T @ g @ c

    def from_adapted(self, g):
        c = self.adapted_change
        return c @ g @ c.conj().T

    @functools.cached_property
    def _log_diag_map(self):
        """Pseudo-inverse taking the log-diagonal in adapted coordinates to (a-coords, t1-coords)."""
        cols = [np.diag(self.to_adapted(h)).real for h in self.basis_a]
        n_t = 0
        if self.complexified:
            cols += [np.diag(self.to_adapted(1j * t)).real for t in self.basis_t1]
            n_t = len(self.basis_t1)
        m = np.array(cols).T
        return np.linalg.pinv(m), m, n_t

    def split_log_diagonal(self, logdiag):
        """Split adapted log-diagonal(s) ``(..., rep_dim)`` into a-coordinates and t1-coordinates."""
        pinv, _, n_t = self._log_diag_map
        coords = np.asarray(logdiag) @ pinv.T
        return coords[..., : self.rank], coords[..., self.rank:self.rank + n_t]

    def log_diag_residual(self, logdiag):
        pinv, m, _ = self._log_diag_map
        logdiag = np.asarray(logdiag)
        return np.abs(logdiag - (logdiag @ pinv.T) @ m.T).max(initial=0.0)

    # --- group membership ----------------------------------------------------
    def group_residual(self, g) -> float:
        g = np.asarray(g)
        res = abs(np.linalg.det(g) - 1.0)
        if self.form is not None:
            res = max(res, np.abs(g.T @ self.form @ g - self.form).max())
        if not self.complexified:
            res = max(res, np.abs(np.imag(g)).max(initial=0.0))
        return float(res)

    def compact_residual(self, k) -> float:
        k = np.asarray(k)
        return float(np.abs(k @ k.conj().T - np.eye(self.rep_dim)).max())

    # --- Haar samplers ---------------------------------------------------
    def haar_k(self, rng, count):
        """Haar samples of the real form's maximal compact subgroup K."""
        if self.real_name.startswith("sl"):
            ks = haar_orthogonal(rng, self.rep_dim, count)
        else:
            ks = np.zeros((count, self.rep_dim, self.rep_dim))
            ks[:, 0, 0] = 1.0
            ks[:, 1:, 1:] = haar_orthogonal(rng, self.rep_dim - 1, count)
        return ks.astype(self.dtype) if self.complexified else ks

    def haar_u(self, rng, count):
        """Haar samples of U (complexified families only)."""
        if not self.complexified:
            raise ValueError(f"{self.name} is not a complexified family")
        if self.name.startswith("sl"):
            return haar_unitary(rng, self.rep_dim, count)
        # U = D^-1 SO(5) D with D = diag(i, 1, 1, 1, 1)
        r = haar_orthogonal(rng, self.rep_dim, count).astype(complex)
        r[:, 0, 1:] *= -1j
        r[:, 1:, 0] *= 1j
        return r


# ---------------------------------------------------------------------------
# construction

def _sl_real_data(n):
    k = [_unit(n, i, j) - _unit(n, j, i) for i in range(n) for j in range(i + 1, n)]
    a = [_unit(n, i, i) - _unit(n, n - 1, n - 1) for i in range(n - 1)]
    p = [_unit(n, i, j) + _unit(n, j, i) for i in range(n) for j in range(i + 1, n)] + a
    nil = [_unit(n, i, j) for i in range(n) for j in range(i + 1, n)]
    h_dom = np.array([n - 1 - 2 * i for i in range(n)], dtype=float)[: n - 1]
    reps = []
    for perm in itertools.permutations(range(n)):
        pm = np.zeros((n, n))
        pm[list(perm), list(range(n))] = 1.0
        if np.linalg.det(pm) < 0:
            pm[0, :] *= -1.0
        reps.append(pm)
    return dict(form=None, k=k, p=p, a=a, n=nil, m=[], t1=[], change=np.eye(n),
                h_dom=h_dom, reps=reps)


def _so1n_real_data(nn):
    d = nn + 1
    last = d - 1
    form = np.diag([1.0] + [-1.0] * nn)
    k = [_unit(d, i, j) - _unit(d, j, i) for i in range(1, d) for j in range(i + 1, d)]
    p = [_unit(d, 0, j) + _unit(d, j, 0) for j in range(1, d)]
    a = [_unit(d, 0, last) + _unit(d, last, 0)]
    nil = [_unit(d, 0, j) + _unit(d, j, 0) - _unit(d, j, last) + _unit(d, last, j) for j in range(1, last)]
    m = [_unit(d, i, j) - _unit(d, j, i) for i in range(1, last) for j in range(i + 1, last)]
    t1 = [_unit(d, i, i + 1) - _unit(d, i + 1, i) for i in range(1, last - 1, 2)]
    change = np.zeros((d, d))
    change[0, 0] = change[last, 0] = 1 / np.sqrt(2)
    change[0, last] = 1 / np.sqrt(2)
    change[last, last] = -1 / np.sqrt(2)
    for j in range(1, last):
        change[j, j] = 1.0
    w = np.eye(d)
    w[1, 1] = w[last, last] = -1.0  # rotation by pi in the (e_2, e_{n+1}) plane
    return dict(form=form, k=k, p=p, a=a, n=nil, m=m, t1=t1, change=change,
                h_dom=np.array([1.0]), reps=[np.eye(d), w])


def _so5c_extras():
    d = 5
    nplus = np.zeros((d, d), dtype=complex)
    nplus[1, 3], nplus[2, 3], nplus[3, 1], nplus[3, 2] = 1j, 1, -1j, -1
    s = 1 / np.sqrt(2)
    change = np.zeros((d, d), dtype=complex)
    change[0, 0], change[4, 0] = s, s
    change[1, 1], change[2, 1] = s, -1j * s
    change[3, 2] = 1.0
    change[1, 3], change[2, 3] = s, 1j * s
    change[0, 4], change[4, 4] = s, -s
    return [nplus], change


@functools.lru_cache(maxsize=None)
def make_family(name: str) -> GroupFamily:
    if name not in FAMILY_NAMES:
        raise UnsupportedFamily(f"unknown family {name!r}; supported: {', '.join(FAMILY_NAMES)}")
    complexified = name in REAL_FORM
    real_name = REAL_FORM.get(name, name)
    if real_name.startswith("sl"):
        data = _sl_real_data(int(real_name[2]))
    else:
        data = _so1n_real_data(int(real_name[3]))
    nplus = []
    change = data["change"]
    if name == "so5c":
        nplus, change = _so5c_extras()
    dtype = complex if complexified else float
    fam = GroupFamily(
        name=name,
        rep_dim=change.shape[0],
        complexified=complexified,
        real_name=real_name,
        form=None if data["form"] is None else _frozen([data["form"]])[0],
        basis_k=_frozen(data["k"]),
        basis_p=_frozen(data["p"]),
        basis_a=_frozen(data["a"]),
        basis_n=_frozen(data["n"]),
        basis_m=_frozen(data["m"]),
        basis_t1=_frozen(data["t1"]),
        basis_nplus=_frozen(nplus),
        adapted_change=_frozen([np.asarray(change, dtype=dtype)])[0],
        h_dominant=_frozen([data["h_dom"]])[0],
        weyl_reps=_frozen([np.asarray(r, dtype=dtype) for r in data["reps"]]),
    )
    return fam


def real_form(fam: GroupFamily) -> GroupFamily:
    return make_family(fam.real_name)


def complexification(fam: GroupFamily) -> GroupFamily:
    if fam.complexified:
        return fam
    if fam.name not in COMPLEXIFICATION:
        raise UnsupportedFamily(f"no complexified family registered for {fam.name}")
    return make_family(COMPLEXIFICATION[fam.name])


def bracket(x, y):
    return x @ y - y @ x


# ---------------------------------------------------------------------------
# restricted roots

@dataclass(frozen=True)
class RootDatum:
    rank: int
    roots: np.ndarray  # (count, rank): alpha(H_i) for H_i in basis_a
    multiplicities: tuple
    positive: tuple  # indices into roots
    simple: tuple
    dim_m: int
    spaces: tuple  # root-space bases (tuples of matrices), aligned with roots

    def positive_roots(self):
        return self.roots[list(self.positive)]


def _cluster(values, tol):
    order = np.argsort(values)
    groups = []
    for idx in order:
        if groups and abs(values[idx] - values[groups[-1][-1]]) <= tol:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    return groups


def restricted_roots(fam: GroupFamily, seed: int = 0, max_retries: int = 10) -> RootDatum:
    """Restricted roots of the real form by diagonalizing ad(H) for a generic H in a."""
    fam = real_form(fam)
    basis = fam.real_algebra_basis
    expander = BasisExpander(basis)
    dim = len(basis)

    def ad(h):
        return np.array([expander.coords(bracket(h, b)) for b in basis]).T

    ads = [ad(h) for h in fam.basis_a]
    rng = np.random.default_rng(seed)
    for _ in range(max_retries):
        coeffs = rng.integers(1, 98, size=fam.rank).astype(float)
        adh = sum(c * m for c, m in zip(coeffs, ads))
        evals, evecs = np.linalg.eig(adh)
        if np.abs(evals.imag).max() > 1e-8:
            continue
        evals, evecs = evals.real, evecs.real
        groups = _cluster(evals, 1e-6 * max(1.0, np.abs(evals).max()))
        roots, mults, spaces = [], [], []
        zero_dim = 0
        ok = True
        for g in groups:
            v = evecs[:, g]
            q, _ = np.linalg.qr(v)
            # every basis_a element must act by a scalar on the eigenspace
            vals = []
            for m in ads:
                block = q.T @ m @ q
                lam = np.trace(block) / len(g)
                if np.abs(m @ q - lam * q).max() > 1e-8 * max(1.0, np.abs(m).max()):
                    ok = False
                vals.append(lam)
            vals = np.array(vals)
            if abs(evals[g[0]]) <= 1e-6 * max(1.0, np.abs(evals).max()):
                zero_dim += len(g)
                continue
            roots.append(vals)
            mults.append(len(g))
            spaces.append(tuple(expander.combine(q[:, j]) for j in range(q.shape[1])))
        if not ok:
            continue
        roots = np.array(roots)
        # positivity and root-space bookkeeping
        pos = tuple(i for i, r in enumerate(roots) if r @ fam.h_dominant > 0)
        pos_set = set(pos)
        simple = []
        for i in pos:
            decomposable = any(
                np.allclose(roots[i], roots[j] + roots[k2], atol=1e-8)
                for j in pos_set for k2 in pos_set
            )
            if not decomposable:
                simple.append(i)
        dim_m = zero_dim - fam.rank
        datum = RootDatum(rank=fam.rank, roots=roots, multiplicities=tuple(mults), positive=pos,
                          simple=tuple(simple), dim_m=dim_m, spaces=tuple(spaces))
        assert dim == fam.rank + dim_m + sum(mults)
        return datum
    raise GenericityFailure(f"{fam.name}: no generic element found after {max_retries} attempts")


# ---------------------------------------------------------------------------
# Weyl group

@dataclass(frozen=True)
class WeylGroup:
    elements: tuple  # r x r matrices acting on a-coordinates
    representatives: tuple  # k_w in K, aligned with elements

    def __len__(self):
        return len(self.elements)

    def orbit(self, y, tol=1e-10):
        y = np.asarray(y, dtype=float)
        pts = []
        for w in self.elements:
            p = w @ y
            if not any(np.abs(p - q).max() <= tol for q in pts):
                pts.append(p)
        return np.array(pts)


def _ad_on_a(fam, k):
    expander = BasisExpander(fam.basis_a)
    cols = []
    for h in fam.basis_a:
        z = k @ h @ np.linalg.inv(k)
        c = expander.coords(z)
        if expander.residual(z, c) > 1e-10:
            raise ValueError("representative does not normalize a")
        cols.append(c)
    return np.array(cols).T


@functools.lru_cache(maxsize=None)
def weyl_group(fam: GroupFamily) -> WeylGroup:
    """Weyl group from stored representatives k_w, validated against the root system."""
    rf = real_form(fam)
    mats = [_ad_on_a(rf, np.real(k)) for k in rf.weyl_reps]
    datum = restricted_roots(rf)
    gram = rf.trace_gram
    for w in mats:
        if np.abs(w.T @ gram @ w - gram).max() > 1e-10:
            raise AssertionError(f"{fam.name}: Weyl element not orthogonal for the trace form")
        winv = np.linalg.inv(w)
        moved = datum.roots @ winv
        for r in moved:
            if not np.any(np.abs(datum.roots - r).max(axis=1) < 1e-8):
                raise AssertionError(f"{fam.name}: Weyl element does not permute roots")
    reps = fam.weyl_reps if fam.complexified else rf.weyl_reps
    return WeylGroup(elements=_frozen(mats), representatives=reps)


# ---------------------------------------------------------------------------
# algebra-level Iwasawa projection

def iwasawa_project_algebra(fam: GroupFamily, z, tol: float = 1e-10):
    """Split ``z`` into (nilpotent, abelian, compact) components.

    Real families: g = n + a + k.  Complexified families: g_C = n1 + a1 + u with
    a1 = a + i t1; the compact component is the projection onto u along b1.
    """
    z = np.asarray(z)
    expander, (nn, na, _) = fam._iwasawa_expander
    c = expander.coords(z)
    scale = max(1.0, float(np.abs(z).max(initial=0.0)))
    if expander.residual(z, c) > tol * scale:
        raise NotInAlgebra(f"matrix is not in the Lie algebra of {fam.name}")
    nb, ab, cb = fam.iwasawa_algebra_bases
    parts = []
    for basis, coeffs in ((nb, c[:nn]), (ab, c[nn:nn + na]), (cb, c[nn + na:])):
        out = np.zeros_like(z, dtype=complex if fam.complexified else z.dtype)
        for ci, b in zip(coeffs, basis):
            out = out + ci * b
        parts.append(out)
    return tuple(parts)


def project_compact(fam: GroupFamily, z):
    return iwasawa_project_algebra(fam, z)[2]
