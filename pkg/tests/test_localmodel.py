import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from momentum_lab.errors import DimensionMismatch, DomainError, OutOfChart
from momentum_lab.geomcone import cone_is_full
from momentum_lab.localmodel import (
    Criticality, LocalModel, Polynomial, classify_critical, gamma_cone, grid_local_max,
    inner_point_probe, model_momentum, model_momentum_restricted, planted_full_model, psi_map,
    random_model,
)

seeds = st.integers(0, 2**32 - 1)


def _model(**kw):
    base = dict(k=1, lambdas=[[1.0, 0.5]], N=2, phi_m=[0.1, 0.2, 0.3])
    base.update(kw)
    return LocalModel(**base)


def test_model_momentum_examples():
    m = _model()
    assert np.allclose(model_momentum(m, [0.0], [0, 0], [0, 0]), m.phi_m)
    assert np.allclose(model_momentum(m, [0.0], [1, 0], [1, 0]), m.phi_m + [0, 1.0, 0.5])
    with pytest.raises(DimensionMismatch):
        model_momentum(m, [0.0, 1.0], [0, 0], [0, 0])


@settings(max_examples=50, deadline=None)
@given(seeds, st.floats(0, 2 * np.pi))
def test_rotation_invariance(seed, theta):
    rng = np.random.default_rng(seed)
    m = random_model(rng, 1, 2, 3, 2)
    x, q, p = rng.standard_normal(1), rng.standard_normal(3), rng.standard_normal(3)
    c, s = np.cos(theta), np.sin(theta)
    assert np.allclose(model_momentum(m, x, q, p), model_momentum(m, x, c * q - s * p, s * q + c * p),
                       atol=1e-14 * 10)


def test_restricted_examples():
    m = LocalModel(k=0, lambdas=[[2.0]], N=1, phi_m=[1.0], psi=(Polynomial(1, [((2,), 1.0)]),))
    assert np.allclose(model_momentum_restricted(m, np.zeros(0), [0.1]), 1.0 + 0.5 * 2.0 * (0.01 + 0.0001))
    m0 = _model()
    q = np.array([0.3, -0.2])
    assert np.allclose(model_momentum_restricted(m0, [0.1], q), model_momentum(m0, [0.1], q, np.zeros(2)))
    with pytest.raises(OutOfChart):
        psi_map(m0, [0.0], [1.0, 1.0])


def test_invariants_enforced():
    with pytest.raises(DomainError):
        _model(lambdas=[[0.0, 0.0]])
    with pytest.raises(DomainError):
        _model(psi=(Polynomial(3, [((0, 1, 0), 1.0)]),))
    with pytest.raises(DimensionMismatch):
        _model(N=0)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_composition_law(seed):
    rng = np.random.default_rng(seed)
    m = random_model(rng, 1, 3, 4, 2)
    for _ in range(100):
        z = rng.standard_normal(5)
        z *= rng.random() / np.linalg.norm(z)
        w = psi_map(m, z[:1], z[1:])
        assert np.all(w[1:] >= 0)
        direct = model_momentum_restricted(m, z[:1], z[1:])
        assert np.allclose(direct, m.phi_m + np.concatenate([w[:1], w[1:] @ m.lambdas]), atol=1e-13)


def test_classify_examples():
    m = LocalModel(k=0, lambdas=[[1.0, 0.0], [0.0, 1.0]], N=2, phi_m=[0.0, 0.0])
    assert classify_critical(m, [-1.0, -1.0]) is Criticality.LOCAL_MAX
    assert classify_critical(m, [1.0, -1.0]) is Criticality.NOT_LOCAL_MAX
    m0 = LocalModel(k=0, lambdas=[[1.0, 0.0]], N=1, phi_m=[0.0, 0.0])
    assert classify_critical(m0, [0.0, 1.0]) is Criticality.LOCAL_MAX


def test_grid_search_agrees_on_sign_examples():
    psi = (Polynomial(3, [((0, 2, 0), 1.0), ((1, 1, 0), -0.5)]), Polynomial(3, [((0, 0, 2), 0.7)]))
    m = LocalModel(k=1, lambdas=[[1.0], [-2.0]], N=2, phi_m=[0.0, 0.0], psi=psi)
    assert grid_local_max(m, np.array([-1.0])) is False
    m2 = LocalModel(k=1, lambdas=[[-1.0], [-2.0]], N=2, phi_m=[0.0, 0.0], psi=psi)
    assert grid_local_max(m2, np.array([1.0]))


def test_gamma_cone_examples():
    full = LocalModel(k=0, lambdas=[[1, 0], [0, 1], [-1, -1]], N=3, phi_m=[0, 0])
    assert cone_is_full(gamma_cone(full))
    assert not cone_is_full(gamma_cone(LocalModel(k=0, lambdas=[[1, 0]], N=1, phi_m=[0, 0])))


@pytest.mark.parametrize("s0", [0.01, 0.5, 1.0])
def test_probe_with_zero_psi(s0):
    m = LocalModel(k=1, lambdas=[[1, 0], [0, 1], [-1, -1]], N=3, phi_m=[0, 0, 0])
    res = inner_point_probe(m, [1, 1, 1], s0)
    assert res.success and res.max_residual <= 1e-6


@settings(max_examples=15, deadline=None)
@given(seeds, st.integers(1, 2))
def test_probe_planted(seed, dim_t):
    rng = np.random.default_rng(seed)
    m, v = planted_full_model(rng, 1, dim_t, dim_t + 1, 4)
    assert cone_is_full(gamma_cone(m))
    assert inner_point_probe(m, v, 0.01).success


def test_probe_rejects_bad_v():
    m = LocalModel(k=0, lambdas=[[1, 0], [0, 1], [-1, -1]], N=3, phi_m=[0, 0])
    with pytest.raises(DomainError):
        inner_point_probe(m, [1, 2, 1], 0.01)
    with pytest.raises(DomainError):
        inner_point_probe(m, [1, -1, 1], 0.01)


def test_json_roundtrip():
    m = random_model(np.random.default_rng(4), 1, 2, 3, 2)
    d = json.loads(m.to_json())
    assert set(d) == {"k", "l", "N", "lambdas", "phi_m", "psi_coefficients", "r"}
    back = LocalModel.from_json(m.to_json())
    z = np.full(4, 0.1)
    assert np.allclose(back.psi_values(z), m.psi_values(z))
