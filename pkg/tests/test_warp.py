import dataclasses
import json
import math

import numpy as np
import pytest
from scipy.integrate import quad

import warpknot as wk
from warpknot.warp import HALF_PI


def test_trivial_order_is_plain_sine():
    p = wk.build_warp(1, 0.25, 1e-12)
    rr = np.linspace(0, HALF_PI, 513)
    assert np.all(p.sigma(rr) == np.sin(rr))
    assert np.all(p.sigma(rr, 1) == np.cos(rr))


def test_scaled_sine_tail_value(profile_n3):
    # 0.5 lies beyond rho = 0.25, where sigma must equal sin(r)/3 exactly
    assert profile_n3.sigma(0.5) == pytest.approx(math.sin(0.5) / 3, abs=0, rel=1e-15)
    assert profile_n3.sigma(0.5) == pytest.approx(0.1598085, abs=5e-8)


def test_exact_sine_zone_value(profile_n3):
    r_star = profile_n3.a / 2
    assert profile_n3.sigma(r_star) == math.sin(r_star)


def test_eval_at_zero(profile_n3):
    assert profile_n3.sigma(0.0) == 0.0
    assert profile_n3.sigma(0.0, 1) == 1.0
    assert wk.warp_eval(profile_n3, 0.0, 0) == 0.0
    assert wk.warp_eval(profile_n3, 0.0, 1) == 1.0


def test_second_derivative_in_tail():
    p = wk.build_warp(3, 0.3, 1e-12)
    # 0.4 >= b = 0.27: second derivative of sin(r)/3
    assert p.sigma(0.4, 2) == pytest.approx(-math.sin(0.4) / 3, rel=1e-14)
    assert p.sigma(0.4, 2) == pytest.approx(-0.1298, abs=5e-5)


def test_domain_error(profile_n3):
    with pytest.raises(wk.DomainError):
        profile_n3.sigma(-0.2)
    with pytest.raises(wk.DomainError):
        profile_n3.sigma(HALF_PI + 0.1)


def test_bad_arguments():
    with pytest.raises(ValueError):
        wk.build_warp(0, 0.25)
    with pytest.raises(ValueError):
        wk.build_warp(2, 0.9)
    with pytest.raises(ValueError):
        wk.build_warp(2, 0.25, tolerance=-1.0)


@pytest.mark.parametrize("n,rho", [(2, 0.2), (3, 0.25), (7, 0.3)])
def test_verify_warp_passes(n, rho):
    p = wk.build_warp(n, rho, 1e-12)
    rep = wk.verify_warp(p, 2001)
    assert rep.passed, rep.to_text()
    assert rep.sigma_prime_min > 0
    assert rep.sigma_second_max < 0
    assert max(rep.seam_jumps_a) < 1e-8
    assert max(rep.seam_jumps_b) < 1e-8
    assert rep.matches_sine_near_zero and rep.matches_scaled_sine_tail


def test_verify_round_profile():
    p = wk.build_warp(1, 0.25, 1e-12)
    rep = wk.verify_warp(p, 1000)
    assert rep.passed
    # sigma'' = -sin r peaks (least negative) at the smallest positive grid point
    rr = np.linspace(0, HALF_PI, 1000)
    assert rep.sigma_second_max == pytest.approx(-math.sin(rr[1]), rel=1e-12)


def test_verify_flags_corrupted_amplitude(profile_n3):
    bad = dataclasses.replace(profile_n3, s=profile_n3.s * 10.0)
    rep = wk.verify_warp(bad, 1000)
    assert not rep.passed
    assert abs(rep.integral_residual) > 1e-6


def test_sandwich_and_signs(profile_n3):
    p = profile_n3
    rr = np.linspace(0, HALF_PI, 4001)
    sig = p.sigma(rr)
    assert np.all(sig <= np.sin(rr) + 1e-12)
    assert np.all(sig >= np.sin(rr) / p.n - 1e-12)
    assert np.all(p.sigma(rr[:-1], 1) > 0)
    assert np.all(p.sigma(rr[1:-1], 2) < 0)


def test_area_constraint_residual(profile_n3):
    p = profile_n3
    val, _ = quad(lambda u: float(p.sigma(u, 1)), 0.0, p.rho,
                  points=[p.a, p.dive_end, p.b], limit=300,
                  epsabs=1e-13, epsrel=1e-13)
    assert abs(val - math.sin(p.rho) / p.n) < 1e-12


def test_seam_smoothness_by_finite_differences(profile_n3):
    """Independent seam check: FD of sigma across each seam vs closed forms."""
    p = profile_n3
    for seam, e in ((p.a, 2e-5), (p.b, 5e-5)):
        vals = [float(p.sigma(seam + k * e)) for k in (-2, -1, 0, 1, 2)]
        d1 = (vals[3] - vals[1]) / (2 * e)
        d2 = (vals[3] - 2 * vals[2] + vals[1]) / e**2
        assert abs(d1 - p.sigma(seam, 1)) < 1e-8
        assert abs(d2 - p.sigma(seam, 2)) < 1e-7


def test_interior_derivative_consistency(profile_n3):
    """Closed-form sigma' and sigma'' match FD of sigma inside the glide."""
    p = profile_n3
    rng = np.random.default_rng(7)
    for r in rng.uniform(p.dive_end * 2, p.b * 0.98, size=12):
        e = 1e-5
        vals = [float(p.sigma(r + k * e)) for k in (-1, 0, 1)]
        d1 = (vals[2] - vals[0]) / (2 * e)
        d2 = (vals[2] - 2 * vals[1] + vals[0]) / e**2
        assert abs(d1 - p.sigma(r, 1)) < 1e-9
        assert abs(d2 - p.sigma(r, 2)) < 2e-5


def test_serialization_roundtrip(profile_n3):
    d = json.loads(json.dumps(profile_n3.to_dict()))
    q = wk.WarpProfile.from_dict(d)
    rr = np.linspace(0, HALF_PI, 257)
    assert np.allclose(q.sigma(rr), profile_n3.sigma(rr), rtol=0, atol=1e-15)
    assert q.blend == profile_n3.blend


def test_grid_size_precondition(profile_n3):
    with pytest.raises(ValueError):
        wk.verify_warp(profile_n3, 50)


def test_infeasible_zone_never_silently_wrong():
    # tiny rho with large n still builds or raises a structured error
    try:
        p = wk.build_warp(7, 0.02, 1e-12)
    except (wk.InfeasibleZone, wk.NoRoot):
        return
    assert wk.verify_warp(p, 1000).passed


def test_infeasible_zone_raised_when_collar_too_thin():
    with pytest.raises((wk.InfeasibleZone, wk.NoRoot)):
        wk.build_warp(23, 0.004, 1e-12)
