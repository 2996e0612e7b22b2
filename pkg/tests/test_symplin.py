import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from momentum_lab.errors import DimensionMismatch, NotComplementary, NotInvolution, NotLagrangian, SingularInput
from momentum_lab.symplin import (
    INSTANCE_KINDS, LinInvolution, LinTorusAction, SympSpace, Subspace, build_swap_symplectomorphism,
    check_involution_equivalences, darboux_frame, eigensplit, equivalence_suite, instance_from_dict,
    instance_to_dict, is_antisymplectic, is_isotropic, is_lagrangian, random_instance,
    random_symplectic_form, subspace_equal,
)

J2 = SympSpace([[0, 1], [-1, 0]])
J4 = np.zeros((4, 4))
J4[0, 2] = J4[1, 3] = 1
J4[2, 0] = J4[3, 1] = -1
S4 = SympSpace(J4)
E = np.eye(4)


def test_lagrangian_examples():
    assert is_lagrangian(J2, Subspace([1, 0]))
    assert is_lagrangian(S4, Subspace(E[:, [0, 1]]))
    assert not is_isotropic(S4, Subspace(E[:, [0, 2]]))
    with pytest.raises(DimensionMismatch):
        is_lagrangian(S4, Subspace([1, 0]))


def test_antisymplectic_examples():
    assert is_antisymplectic(J2, LinInvolution(np.diag([1.0, -1.0])))
    assert not is_antisymplectic(J2, LinInvolution(np.eye(2)))
    assert not is_antisymplectic(J2, LinInvolution(-np.eye(2)))


def test_eigensplit_examples():
    vp, vm = eigensplit(LinInvolution(np.diag([1.0, -1.0])))
    assert subspace_equal(vp, Subspace([1, 0])) and subspace_equal(vm, Subspace([0, 1]))
    vp, vm = eigensplit(LinInvolution(np.eye(4)))
    assert vp.dim == 4 and vm.dim == 0
    vp, vm = eigensplit(LinInvolution(np.array([[0.0, 1.0], [1.0, 0.0]])))
    assert subspace_equal(vp, Subspace([1, 1])) and subspace_equal(vm, Subspace([1, -1]))
    with pytest.raises(NotInvolution):
        LinInvolution(np.diag([1.0, 2.0]))


def test_swap_examples():
    phi = build_swap_symplectomorphism(J2, Subspace([1, 0]), Subspace([0, 1]))
    assert np.allclose(phi, [[0, -1], [1, 0]])
    phi4 = build_swap_symplectomorphism(S4, Subspace(E[:, [0, 1]]), Subspace(E[:, [2, 3]]))
    assert np.allclose(phi4 @ E[:, 0], E[:, 2]) and np.allclose(phi4 @ E[:, 3], -E[:, 1])
    assert np.allclose(phi4.T @ J4 @ phi4, J4)
    assert np.allclose(phi4 @ phi4, -np.eye(4))
    with pytest.raises(NotLagrangian):
        build_swap_symplectomorphism(S4, Subspace(E[:, [0, 2]]), Subspace(E[:, [1, 3]]))
    with pytest.raises(NotComplementary):
        build_swap_symplectomorphism(S4, Subspace(E[:, [0, 1]]), Subspace(E[:, [0, 1]]))


def test_bad_forms():
    with pytest.raises(DimensionMismatch):
        SympSpace(np.eye(2))
    with pytest.raises(SingularInput):
        SympSpace(np.zeros((2, 2)))


def test_report_examples():
    rep = check_involution_equivalences(J2, LinInvolution(np.diag([1.0, -1.0])),
                                        LinTorusAction((0.7 * np.array([[0.0, -1.0], [1.0, 0.0]]),)))
    assert rep.s1_antisymplectic and rep.s2_both_lagrangian and rep.s3_swap_exists and rep.s4_action
    rep = check_involution_equivalences(J2, LinInvolution(np.eye(2)))
    assert not rep.s1_antisymplectic and not rep.s2_both_lagrangian and rep.consistent
    # an action commuting with tau cannot satisfy (4)
    rep = check_involution_equivalences(J2, LinInvolution(np.diag([1.0, -1.0])),
                                        LinTorusAction((np.diag([1.0, -1.0]),)))
    assert rep.s4_action is False and not rep.consistent


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_darboux_frame(seed, n):
    rng = np.random.default_rng(seed)
    w = random_symplectic_form(rng, n)
    e, f = darboux_frame(w, rng)
    assert np.allclose(e.T @ w @ f, np.eye(n), atol=1e-9)
    assert np.allclose(e.T @ w @ e, 0, atol=1e-9) and np.allclose(f.T @ w @ f, 0, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.sampled_from(INSTANCE_KINDS))
def test_equivalence_law(seed, n, kind):
    inst = random_instance(np.random.default_rng(seed), n, kind)
    rep = check_involution_equivalences(inst.space, inst.inv, inst.action)
    assert rep.consistent
    if rep.s2_both_lagrangian:
        assert rep.s1_antisymplectic and rep.s3_swap_exists
    if rep.s1_antisymplectic:
        assert rep.s2_both_lagrangian
    if kind == "antisymplectic":
        vp, vm = eigensplit(inst.inv)
        phi = build_swap_symplectomorphism(inst.space, vp, vm)
        assert np.abs(phi.T @ inst.space.omega @ phi - inst.space.omega).max() <= 1e-10 * np.abs(phi).max() ** 2 * 10
        assert subspace_equal(Subspace(phi @ vp.basis), vm) and subspace_equal(Subspace(phi @ vm.basis), vp)
        # (4) => (2): the supplied action forces V-1 Lagrangian
        assert rep.s4_action and is_lagrangian(inst.space, vm)


def test_suite_and_json_roundtrip():
    r = equivalence_suite(50, seed=3)
    assert r["pass"] and r["inconsistencies"] == 0
    inst = random_instance(np.random.default_rng(0), 2, "antisymplectic")
    back = instance_from_dict(instance_to_dict(inst))
    assert np.array_equal(back.inv.tau, inst.inv.tau)
    assert len(back.action.generators) == len(inst.action.generators)
