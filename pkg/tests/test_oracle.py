import math

import numpy as np
import pytest

from decodyn.bath import BathMode, BathSpec, b2, discretize_ohmic
from decodyn.model import LinearCoupling, PolynomialCoupling, QuadraticCoupling
from decodyn.oracle import FockConfig, McEstimate, fock_quantum_factor, mc_classical_factor, short_time_fit
from decodyn.strongdec import classical_factor, quantum_factor

SINGLE = BathSpec(modes=(BathMode(1.0, 1.0, 1.0),))
CUBIC = PolynomialCoupling((0.0, 0.0, 0.0, 1.0))


def test_mc_refuses_tiny_or_ragged_sample_counts():
    with pytest.raises(ValueError, match="too small"):
        mc_classical_factor(2.0, 0.0, 1.0, LinearCoupling(1.0), SINGLE, n_samples=999)
    with pytest.raises(ValueError, match="multiple"):
        mc_classical_factor(2.0, 0.0, 1.0, LinearCoupling(1.0), SINGLE, n_samples=1050)


def test_mc_uncoupled_bath_is_exactly_one():
    bath = BathSpec(modes=(BathMode(1.0, 1.0, 0.0), BathMode(1.0, 2.0, 0.0)))
    est = mc_classical_factor(2.0, 0.0, 1.3, LinearCoupling(1.0), bath, n_samples=2000)
    assert est.mean == 1.0 + 0.0j
    assert est.std_error == 0.0


def test_mc_time_zero_is_exactly_one():
    est = mc_classical_factor(2.0, 0.0, 0.0, CUBIC, SINGLE, n_samples=2000)
    assert est.mean == 1.0 + 0.0j
    assert est.std_error == 0.0


def test_mc_reproducible():
    a = mc_classical_factor(2.0, 0.0, 0.9, LinearCoupling(1.0), SINGLE, n_samples=5000, seed=3)
    b = mc_classical_factor(2.0, 0.0, 0.9, LinearCoupling(1.0), SINGLE, n_samples=5000, seed=3)
    assert a == b
    c = mc_classical_factor(2.0, 0.0, 0.9, LinearCoupling(1.0), SINGLE, n_samples=5000, seed=4)
    assert c.mean != a.mean


@pytest.mark.parametrize("t", [math.pi / 4, math.pi / 2, math.pi])
def test_mc_matches_closed_form_linear(t):
    est = mc_classical_factor(2.0, 0.0, t, LinearCoupling(1.0), SINGLE, n_samples=100_000, seed=0)
    analytic = classical_factor(2.0, 0.0, t, LinearCoupling(1.0), SINGLE).value
    assert est.sigma_distance(analytic) < 3.0
    # modulus and phase separately: validates decay and drift kernels
    assert abs(abs(est.mean) - abs(analytic)) < 3 * est.std_error
    phase_err = abs(np.angle(est.mean) - np.angle(analytic))
    assert phase_err < 3 * est.std_error / abs(est.mean)


def test_mc_matches_closed_form_cubic_multimode():
    bath = discretize_ohmic(0.25, 1.0, 50, 5.0, beta=2.0)
    for t in (0.1, 0.3):
        est = mc_classical_factor(2.0, 0.0, t, CUBIC, bath, n_samples=50_000, seed=1)
        analytic = classical_factor(2.0, 0.0, t, CUBIC, bath).value
        assert est.sigma_distance(analytic) < 3.0


def test_mc_error_scales_as_inverse_sqrt_n():
    t = math.pi / 2
    small = mc_classical_factor(2.0, 0.0, t, LinearCoupling(1.0), SINGLE, n_samples=10_000, seed=2)
    large = mc_classical_factor(2.0, 0.0, t, LinearCoupling(1.0), SINGLE, n_samples=40_000, seed=2)
    ratio = large.std_error / small.std_error
    assert 0.35 < ratio < 0.65


def test_mc_estimate_validation():
    with pytest.raises(ValueError):
        McEstimate(mean=1.0 + 0j, std_error=-1.0, n_samples=10)
    with pytest.raises(ValueError):
        McEstimate(mean=1.0 + 0j, std_error=0.0, n_samples=0)


def test_fock_requires_single_mode():
    bath = BathSpec(modes=(BathMode(1.0, 1.0, 1.0), BathMode(1.0, 2.0, 0.5)))
    with pytest.raises(ValueError, match="single"):
        fock_quantum_factor(1.0, -1.0, 1.0, LinearCoupling(1.0), bath)


def test_fock_config_validation():
    with pytest.raises(ValueError):
        FockConfig(n_levels=4)


def test_fock_uncoupled_is_unity():
    bath = BathSpec(modes=(BathMode(1.0, 1.0, 0.0),))
    for t in (0.0, 1.0, 5.0):
        assert fock_quantum_factor(1.0, -1.0, t, LinearCoupling(1.0), bath) == pytest.approx(1.0)


def test_fock_modulus_matches_decay_kernel():
    ts = np.linspace(0.0, 2 * math.pi, 10)
    overlaps = fock_quantum_factor(1.0, -1.0, ts, LinearCoupling(1.0), SINGLE)
    f = LinearCoupling(1.0)
    for t, overlap in zip(ts, overlaps):
        fd = f.finite_difference(0.0, 2.0)
        expected = math.exp(-4.0 * fd**2 * b2(SINGLE, float(t)))
        assert abs(overlap) == pytest.approx(expected, abs=1e-10)
    assert abs(overlaps[-1]) == pytest.approx(1.0, abs=1e-6)  # recurrence


def test_fock_modulus_for_quadratic_coupling():
    # coupling stays linear in the bath coordinate, so the closed form holds
    f = QuadraticCoupling(1.0, 0.3)
    for t in (0.6, 1.4, 2.9):
        overlap = fock_quantum_factor(1.0, -1.0, t, f, SINGLE)
        fd = f.finite_difference(0.0, 2.0)
        expected = math.exp(-4.0 * fd**2 * b2(SINGLE, t))
        assert abs(overlap) == pytest.approx(expected, rel=1e-9)


def test_fock_thermal_modulus():
    bath = BathSpec(modes=(BathMode(1.0, 1.0, 1.0),), beta=2.0)
    f = LinearCoupling(1.0)
    for t in (0.8, 2.0):
        overlap = fock_quantum_factor(1.0, -1.0, t, f, bath, FockConfig(n_levels=96))
        expected = math.exp(-4.0 * b2(bath, t))
        assert abs(overlap) == pytest.approx(expected, rel=1e-6)


def test_fock_truncation_failure_raises():
    strong = BathSpec(modes=(BathMode(1.0, 1.0, 20.0),))
    with pytest.raises(RuntimeError, match="not converged"):
        fock_quantum_factor(1.0, -1.0, 2.0, LinearCoupling(1.0), strong, FockConfig(n_levels=8))


def test_fock_phase_matches_drift_kernel_for_linear_coupling():
    # for f = Q the implemented quantum phase and the branch overlap agree
    for t in (0.7, 1.9):
        overlap = fock_quantum_factor(2.0, 0.0, t, LinearCoupling(1.0), SINGLE)
        fac = quantum_factor(2.0, 0.0, t, LinearCoupling(1.0), SINGLE)
        diff = np.angle(overlap * np.exp(-1j * fac.phase))
        assert abs(diff) < 1e-8


def test_short_time_fit_recovers_exact_quadratic():
    ts = np.linspace(0.0, 1.0, 40)
    vals = 0.25 + 1.5 * ts - 2.0 * ts**2
    c1, c2 = short_time_fit(ts, vals, window=1.0)
    assert c1 == pytest.approx(1.5, rel=1e-12)
    assert c2 == pytest.approx(-2.0, rel=1e-12)


def test_short_time_fit_constant_series():
    ts = np.linspace(0.0, 1.0, 20)
    c1, c2 = short_time_fit(ts, np.full(20, 0.3), window=1.0)
    assert c1 == 0.0
    assert c2 == 0.0


def test_short_time_fit_input_validation():
    ts = np.linspace(0.0, 1.0, 20)
    with pytest.raises(ValueError, match="at least 8"):
        short_time_fit(ts, np.zeros(20), window=0.2)
    with pytest.raises(ValueError, match="start at t = 0"):
        short_time_fit(ts + 0.5, np.zeros(20), window=1.4)
    degenerate = np.array([0.0] + [1.0] * 9)
    with pytest.raises(ValueError, match="ill-conditioned"):
        short_time_fit(degenerate, np.zeros(10), window=1.0)
