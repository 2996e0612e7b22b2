import numpy as np
import pytest

from momentum_lab.errors import NotCompact, NotInCompactAlgebra, NotInTorus, UnsupportedFamily
from momentum_lab.leaf import (
    EXAMPLE_N, Leaf, antisymplectic_defect, check_leaf_properties, example_so14, involution_tau,
    kak_rank_one, leaf_point, momentum, reconstruct_residual, symplectic_form, torus_act,
    torus_element, vector_field, vector_field_fd,
)
from momentum_lab.liecore import make_family, weyl_group

LEAVES = [("sl2c", [0.7]), ("sl3c", [0.5, 0.2]), ("so5c", [0.5])]


def _points(leaf, count, seed=0):
    us = leaf.fam.haar_u(np.random.default_rng(seed), count)
    return [leaf_point(leaf, u) for u in us]


@pytest.mark.parametrize("name,h", LEAVES)
def test_leaf_point_basics(name, h):
    leaf = Leaf.create(name, h)
    base = leaf_point(leaf, np.eye(leaf.fam.rep_dim))
    assert np.allclose(base.b, leaf.a)
    assert np.allclose(momentum(leaf, base), h)
    for pt in _points(leaf, 10):
        assert reconstruct_residual(leaf, pt) <= 1e-10


@pytest.mark.parametrize("name,h", LEAVES)
def test_weyl_points(name, h):
    leaf = Leaf.create(name, h)
    w = weyl_group(leaf.fam)
    for wm, kw in zip(w.elements, w.representatives):
        pt = leaf_point(leaf, np.asarray(kw, dtype=complex))
        assert np.allclose(momentum(leaf, pt), wm @ leaf.log_a, atol=1e-10)


def test_rejects():
    with pytest.raises(UnsupportedFamily):
        Leaf.create("sl2r", [1.0])
    leaf = Leaf.create("sl2c", [0.7])
    with pytest.raises(NotCompact):
        leaf_point(leaf, np.diag([2.0, 0.5]))
    pt = leaf_point(leaf, np.eye(2))
    with pytest.raises(NotInTorus):
        torus_act(leaf, np.array([[0, -1], [1, 0]], dtype=complex), pt)
    with pytest.raises(NotInCompactAlgebra):
        vector_field(leaf, np.diag([1.0, -1.0]), pt)


@pytest.mark.parametrize("name,h", LEAVES)
def test_torus_group_law_and_invariance(name, h):
    leaf = Leaf.create(name, h)
    rng = np.random.default_rng(1)
    t1 = torus_element(leaf, rng.standard_normal(leaf.fam.rank))
    t2 = torus_element(leaf, rng.standard_normal(leaf.fam.rank))
    for pt in _points(leaf, 5):
        assert np.allclose(torus_act(leaf, np.eye(leaf.fam.rep_dim), pt).b, pt.b, atol=1e-12)
        lhs = torus_act(leaf, t1, torus_act(leaf, t2, pt)).b
        assert np.allclose(lhs, torus_act(leaf, t1 @ t2, pt).b, atol=1e-10)
        assert np.allclose(momentum(leaf, torus_act(leaf, t1, pt)), momentum(leaf, pt), atol=1e-10)


@pytest.mark.parametrize("name,h", LEAVES)
def test_vector_field_matches_finite_differences(name, h):
    leaf = Leaf.create(name, h)
    for pt in _points(leaf, 3, seed=2):
        for x in leaf.fam.basis_u:
            x = np.asarray(x, dtype=complex)
            assert np.abs(vector_field(leaf, x, pt) - vector_field_fd(leaf, x, pt)).max() <= 1e-6


def test_vector_field_trivial_cases():
    leaf = Leaf.create("sl3c", [0.0, 0.0])
    pt = leaf_point(leaf, np.eye(3))
    for x in leaf.fam.basis_u:
        assert np.abs(vector_field(leaf, np.asarray(x, dtype=complex), pt)).max() <= 1e-14


@pytest.mark.parametrize("name,h", LEAVES)
def test_form_antisymmetric_and_tau(name, h):
    leaf = Leaf.create(name, h)
    basis = [np.asarray(x, dtype=complex) for x in leaf.fam.basis_u]
    for pt in _points(leaf, 3, seed=3):
        for x in basis:
            assert abs(symplectic_form(leaf, pt, x, x)) <= 1e-12
            for y in basis:
                assert abs(symplectic_form(leaf, pt, x, y) + symplectic_form(leaf, pt, y, x)) <= 1e-12
        tt = involution_tau(leaf, involution_tau(leaf, pt))
        assert np.allclose(tt.b, pt.b, atol=1e-10)
        assert np.allclose(momentum(leaf, involution_tau(leaf, pt)), momentum(leaf, pt), atol=1e-9)


def test_real_points_fixed_by_tau():
    leaf = Leaf.create("so5c", [0.5])
    for k in leaf.fam.haar_k(np.random.default_rng(4), 5):
        pt = leaf_point(leaf, k)
        assert np.allclose(involution_tau(leaf, pt).b, pt.b, atol=1e-12)


def test_tau_antisymplectic_when_m_abelian():
    leaf = Leaf.create("sl3c", [0.5, 0.2])
    basis = [np.asarray(x, dtype=complex) for x in leaf.fam.basis_u]
    pt = _points(leaf, 1, seed=5)[0]
    assert max(antisymplectic_defect(leaf, pt, x, y) for x in basis for y in basis) <= 1e-10


def test_leaf_report_keys():
    rep = check_leaf_properties(Leaf.create("sl2c", [0.7]), 5)
    assert set(rep.to_dict()) >= {"lagrangian_residual", "equivariance_residual",
                                  "momentum_invariance_residual", "antisymplectic_probe", "pass"}
    with pytest.raises(ValueError):
        check_leaf_properties(Leaf.create("sl2c", [0.7]), 0)


def test_example_chain():
    r = example_so14()
    assert r.matches()
    assert r.omega == pytest.approx(2.0, abs=1e-9)
    assert r.leaf_b_error <= 1e-10


def test_kak_rank_one():
    fam = make_family("so14")
    k1, t, k2 = kak_rank_one(fam, EXAMPLE_N)
    assert fam.compact_residual(k1) < 1e-12 and fam.compact_residual(k2) < 1e-10
    assert fam.group_residual(k2) < 1e-10 and t > 0


def test_example_detects_perturbation():
    n = EXAMPLE_N.copy()
    bump = np.eye(5)
    bump[0, 0] = bump[4, 4] = np.cosh(0.05)
    bump[0, 4] = bump[4, 0] = np.sinh(0.05)
    assert not example_so14(n @ bump).matches()
