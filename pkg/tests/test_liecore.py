import itertools

import numpy as np
import pytest

from momentum_lab.errors import NotInAlgebra, UnsupportedFamily
from momentum_lab.liecore import (
    FAMILY_NAMES, bracket, complexification, iwasawa_project_algebra, make_family, real_form,
    restricted_roots, weyl_group,
)

EXPECTED = {
    # rank, number of roots, multiplicity of each root, dim m, Weyl order
    "sl2r": (1, 2, 1, 0, 2),
    "sl3r": (2, 6, 1, 0, 6),
    "sl4r": (3, 12, 1, 0, 24),
    "so12": (1, 2, 1, 0, 2),
    "so13": (1, 2, 2, 1, 2),
    "so14": (1, 2, 3, 3, 2),
}


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_root_data(name):
    rank, nroots, mult, dim_m, order = EXPECTED[name]
    fam = make_family(name)
    r = restricted_roots(fam)
    assert fam.rank == rank
    assert len(r.roots) == nroots
    assert set(r.multiplicities) == {mult}
    assert r.dim_m == dim_m
    assert len(r.simple) == rank
    assert len(weyl_group(fam)) == order


def test_unknown_family():
    with pytest.raises(UnsupportedFamily):
        make_family("sp4r")


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_cartan_brackets(name):
    fam = make_family(name)
    k = [np.asarray(x) for x in fam.basis_k]
    p = [np.asarray(x) for x in fam.basis_p]

    def in_span(z, basis):
        m = np.array([b.ravel() for b in basis]).T
        c = np.linalg.lstsq(m, z.ravel(), rcond=None)[0]
        return np.abs(m @ c - z.ravel()).max() < 1e-10

    for x, y in itertools.product(k, p):
        assert in_span(bracket(x, y), p)
    for x, y in itertools.combinations(p, 2):
        assert in_span(bracket(x, y), k)


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_a_abelian_and_weyl_orthogonal(name):
    fam = make_family(name)
    for x, y in itertools.combinations(fam.basis_a, 2):
        assert np.abs(bracket(x, y)).max() < 1e-14
    gram = fam.trace_gram
    for w in weyl_group(fam).elements:
        assert np.allclose(w.T @ gram @ w, gram)


def test_weyl_orbit_sizes():
    w = weyl_group(make_family("sl3r"))
    assert len(w.orbit([1.0, 0.0])) == 6
    assert len(w.orbit([1.0, 1.0])) == 3
    assert len(weyl_group(make_family("sl2r")).orbit([1.0])) == 2


@pytest.mark.parametrize("name", ["sl2c", "sl3c", "so5c"])
def test_real_form_pairs(name):
    fam = make_family(name)
    assert fam.complexified
    assert complexification(real_form(fam)) is fam


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_algebra_projection_sums(name):
    fam = make_family(name)
    rng = np.random.default_rng(3)
    basis = fam.real_algebra_basis
    c = rng.standard_normal(len(basis))
    z = sum(ci * b for ci, b in zip(c, basis)).astype(fam.dtype)
    if fam.complexified:
        z = z + 1j * sum(ci * b for ci, b in zip(rng.standard_normal(len(basis)), basis))
    n, a, k = iwasawa_project_algebra(fam, z)
    assert np.allclose(n + a + k, z, atol=1e-12)


def test_projection_rejects_non_algebra():
    with pytest.raises(NotInAlgebra):
        iwasawa_project_algebra(make_family("sl2r"), np.eye(2))


def test_so5c_nilpotent_adapted_triangular():
    fam = make_family("so5c")
    for x in fam.basis_n1:
        xa = fam.to_adapted(x)
        assert np.abs(np.tril(xa)).max() < 1e-14
