import numpy as np
import pytest

from hermflow import hopf
from hermflow.catalog import bismut_curvature, instantiate
from hermflow.invariant import MetricCoefficients
from hermflow.positivity import (CplxViolationError, Verdict, _alternate,
                                 _partial_matrix, _random_unit, biquadratic,
                                 classify, gamma_threshold)
from tests.conftest import random_point


def test_gamma_threshold_values():
    assert gamma_threshold(2) == 0.0
    assert gamma_threshold(3) == -0.5
    assert gamma_threshold(7) == -0.5
    with pytest.raises(ValueError):
        gamma_threshold(1)


def test_flat_verdict_on_surface(rng):
    h = hopf.HopfMetric(2, 1.0, 0.0)
    res = classify(hopf.bismut_curvature_at(h, random_point(rng, 2)), seed=0)
    assert res.verdict is Verdict.FLAT
    assert res.verdict.is_nonnegative and res.verdict.is_nonpositive


def test_indefinite_verdict_with_certified_witnesses():
    eqs = instantiate("Ni", rho=0, lam=0.0, D=-1.0)
    m = MetricCoefficients(1.0, 1.3, 0.9)
    omega = bismut_curvature(eqs, m)
    res = classify(omega, seed=1)
    assert res.verdict is Verdict.INDEFINITE
    assert res.min_value < -res.tolerance < res.tolerance < res.max_value
    block = omega.mixed_block()
    assert biquadratic(block, *res.min_witness) == pytest.approx(res.min_value,
                                                                 abs=1e-10)
    assert biquadratic(block, *res.max_witness) == pytest.approx(res.max_value,
                                                                 abs=1e-10)
    # the extreme values bracket the worked diagonal entries +-t2
    assert res.min_value == pytest.approx(-m.t2, abs=1e-8)
    assert res.max_value == pytest.approx(m.t2, abs=1e-8)


def test_nonnegative_hopf_with_min_on_radial_direction(rng):
    h = hopf.HopfMetric(3, 1.0, -0.5)
    z = random_point(rng, 3)
    res = classify(hopf.bismut_curvature_at(h, z), seed=2)
    assert res.verdict is Verdict.NON_NEGATIVE
    assert res.min_value == pytest.approx(0.0, abs=res.tolerance)
    # the zero minimum is attained along the radial direction
    block = hopf.bismut_mixed_block(h, z)
    radial = z / np.linalg.norm(z)
    nu = _random_unit(rng, 3)
    assert biquadratic(block, radial, nu) == pytest.approx(0.0, abs=1e-12)
    assert biquadratic(block, nu, radial) == pytest.approx(0.0, abs=1e-12)


def test_refuses_without_pure_type_vanishing(unit_metric):
    omega = bismut_curvature(instantiate("Sv"), unit_metric)
    with pytest.raises(CplxViolationError):
        classify(omega)


def test_partial_matrices_are_hermitian_forms(rng):
    h = hopf.HopfMetric(3, 1.0, 0.8)
    block = hopf.bismut_mixed_block(h, random_point(rng, 3))
    for _ in range(10):
        nu = _random_unit(rng, 3)
        A = _partial_matrix(block, nu, frozen="nu")
        assert np.max(np.abs(A - A.conj().T)) < 1e-10
        xi = _random_unit(rng, 3)
        # the Hermitian form of the partial matrix evaluates the biquadratic
        assert np.vdot(xi, A @ xi).real == pytest.approx(
            biquadratic(block, xi, nu), abs=1e-10)


def test_alternating_iteration_monotone_and_certified(rng):
    eqs = instantiate("Np", rho=1)
    omega = bismut_curvature(eqs, MetricCoefficients(1.2, 0.9, 1.1, u=0.1))
    block = omega.mixed_block()
    for _ in range(10):
        xi0, nu0 = _random_unit(rng, 3), _random_unit(rng, 3)
        val, xi, nu, ok = _alternate(block, xi0, nu0, minimize=True)
        assert ok
        assert biquadratic(block, xi, nu) == pytest.approx(val, abs=1e-10)
        assert val <= biquadratic(block, xi0, nu0) + 1e-12


def test_threshold_grid(rng):
    # non-negative exactly at and below the dimension threshold
    grid = (-0.9, -0.6, -0.5, -0.4, -0.1, 0.0, 0.5)
    for n in (2, 3, 4):
        z = random_point(rng, n)
        for gamma in grid:
            res = classify(hopf.bismut_mixed_block(
                hopf.HopfMetric(n, 1.0, gamma), z), seed=5)
            expected = gamma <= gamma_threshold(n) + 1e-12
            assert res.verdict.is_nonnegative == expected, (n, gamma)


def test_deterministic_under_seed(rng):
    eqs = instantiate("Siv1")
    omega = bismut_curvature(eqs, MetricCoefficients(1.1, 0.9, 1.2, u=0.2j))
    a = classify(omega, seed=7)
    b = classify(omega, seed=7)
    assert a.min_value == b.min_value and a.max_value == b.max_value
    assert np.allclose(a.min_witness[0], b.min_witness[0])


def test_classify_accepts_raw_block():
    block = np.zeros((3, 3, 3, 3), dtype=complex)
    res = classify(block)
    assert res.verdict is Verdict.FLAT
    with pytest.raises(ValueError):
        classify(np.zeros((2, 3, 3, 3), dtype=complex))


def test_nonpositive_verdict(rng):
    # the canonical metric in dimension three is non-positive (trace argument)
    h = hopf.HopfMetric(3, 1.0, 0.0)
    res = classify(hopf.bismut_mixed_block(h, random_point(rng, 3)), seed=3)
    assert res.verdict is Verdict.NON_POSITIVE
    assert res.verdict.is_nonpositive and not res.verdict.is_nonnegative
