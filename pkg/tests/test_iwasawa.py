import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from momentum_lab.errors import DomainError, NotInGroup
from momentum_lab.iwasawa import (
    iwasawa_factor, log_a_batch, log_a_projection, random_group_element, random_nilpotent_element,
    weyl_vertex_errors,
)
from momentum_lab.kostant import closed_form_sl2, rotation
from momentum_lab.liecore import FAMILY_NAMES, make_family
from momentum_lab.numkit import mat_exp


@pytest.mark.parametrize("name", FAMILY_NAMES)
@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_factor_properties(name, seed):
    fam = make_family(name)
    g = random_group_element(fam, np.random.default_rng(seed))
    f = iwasawa_factor(fam, g)
    assert np.linalg.norm(f.product() - g) <= 1e-10 * np.linalg.norm(g)
    assert fam.compact_residual(f.k) < 1e-10
    assert fam.group_residual(f.k) < 1e-10
    # the nilpotent factor is unipotent upper triangular in the adapted basis
    na = fam.to_adapted(f.n)
    assert np.allclose(np.diag(na), 1.0) and np.abs(np.tril(na, -1)).max() < 1e-10


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_factor_identity_and_a(name):
    fam = make_family(name)
    f = iwasawa_factor(fam, np.eye(fam.rep_dim))
    assert np.allclose(f.log_a, 0) and np.allclose(f.k, np.eye(fam.rep_dim))
    y = np.linspace(0.3, -0.2, fam.rank)
    a = mat_exp(fam.a_matrix(y))
    n = random_nilpotent_element(fam, np.random.default_rng(0), 0.5)
    k = fam.haar_k(np.random.default_rng(1), 1)[0]
    assert np.allclose(log_a_projection(fam, n @ a @ k), y, atol=1e-12)


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_weyl_vertices(name):
    fam = make_family(name)
    y = np.arange(1, fam.rank + 1) * 0.7
    assert max(weyl_vertex_errors(fam, y)) <= 1e-10


def test_sl2_closed_form():
    fam = make_family("sl2r")
    theta = np.linspace(0, np.pi, 1000)
    got = log_a_batch(fam, rotation(theta) @ np.diag(np.exp([1.0, -1.0])))[:, 0]
    assert np.abs(got - closed_form_sl2(theta, 1.0)).max() <= 1e-10
    assert closed_form_sl2(np.pi / 4, 1.0) == pytest.approx(-0.6625013742, abs=1e-9)


def test_batch_matches_single():
    fam = make_family("sl3c")
    rng = np.random.default_rng(5)
    gs = np.array([random_group_element(fam, rng) for _ in range(20)])
    single = np.array([log_a_projection(fam, g) for g in gs])
    assert np.allclose(log_a_batch(fam, gs), single, atol=1e-12)


def test_errors():
    fam = make_family("sl2r")
    with pytest.raises(NotInGroup):
        iwasawa_factor(fam, np.diag([2.0, 2.0]))
    with pytest.raises(DomainError):
        iwasawa_factor(fam, np.diag([1e7, 1e-7]))
    with pytest.raises(NotInGroup):
        iwasawa_factor(make_family("so14"), np.eye(5)[::-1])
