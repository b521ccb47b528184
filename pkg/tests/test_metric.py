import math
import warnings

import numpy as np
import pytest

import warpknot as wk
from warpknot.metric import frame_riemann_fd
from warpknot.warp import HALF_PI


def test_coprimality_required():
    with pytest.raises(ValueError):
        wk.build_metric(2, 4, 0.25)


def test_small_orders_warn():
    with pytest.warns(UserWarning):
        wk.build_metric(1, 3, 0.25)


def test_round_metric_components(metric_round):
    g = metric_round.metric_components((math.pi / 4, 0.0, 0.0))
    assert g[0] == 1.0
    assert g[1] == pytest.approx(0.5, rel=1e-15)
    assert g[2] == pytest.approx(0.5, rel=1e-15)


def test_quotient_metric_components(metric_23):
    g = metric_23.metric_components((math.pi / 4, 1.0, 2.0))
    assert g == pytest.approx((1.0, 1.0 / 18.0, 1.0 / 8.0), rel=1e-14)
    # independence of the angles
    g2 = metric_23.metric_components((math.pi / 4, 2.0, 4.0))
    assert g == g2


def test_closure_conditions_at_cores(metric_23):
    assert metric_23.f(0.0) == 0.0
    assert metric_23.f(0.0, 1) == 1.0
    assert metric_23.h(HALF_PI) == 0.0
    assert metric_23.h(HALF_PI, 1) == -1.0


def test_band_values_exact(metric_23):
    r = 0.5
    assert metric_23.f(r) == math.sin(r) / 3
    # h goes through pi/2 - r, which costs one rounding
    assert metric_23.h(r) == pytest.approx(math.cos(r) / 2, rel=4e-16)


def test_christoffel_round(metric_round):
    c = metric_round.christoffel((math.pi / 4, 0.0, 0.0))
    assert c["r_theta_theta"] == pytest.approx(-0.5, rel=1e-14)


def test_christoffel_cotangent_cancellation(metric_23):
    c = metric_23.christoffel((math.pi / 4, 0.0, 0.0))
    # f'/f = cot(r) in the band: the quotient order cancels
    assert c["theta_r_theta"] == pytest.approx(1.0, rel=1e-13)


def test_christoffel_core_guard(metric_23):
    with pytest.raises(wk.CoreSingularity):
        metric_23.christoffel((1e-5, 0.0, 0.0))


def test_christoffel_vs_fd_of_components(metric_23):
    """Closed-form symbols against finite differences of the raw components."""
    eps = 1e-5
    for r in (0.1, 0.4, math.pi / 4, 1.2, 1.5):
        g_p = metric_23.metric_components((r + eps, 0, 0))
        g_m = metric_23.metric_components((r - eps, 0, 0))
        dg_th = (g_p[1] - g_m[1]) / (2 * eps)
        dg_t = (g_p[2] - g_m[2]) / (2 * eps)
        c = metric_23.christoffel((r, 0, 0))
        assert c["r_theta_theta"] == pytest.approx(-0.5 * dg_th, abs=1e-8)
        assert c["r_t_t"] == pytest.approx(-0.5 * dg_t, abs=1e-8)
        g0 = metric_23.metric_components((r, 0, 0))
        assert c["theta_r_theta"] == pytest.approx(0.5 * dg_th / g0[1], abs=1e-7)
        assert c["t_r_t"] == pytest.approx(0.5 * dg_t / g0[2], abs=1e-7)


def test_round_principal_curvatures(metric_round):
    for r in (0.2, 0.7, 1.1, 1.5):
        K = metric_round.principal_curvatures(r)
        assert K == pytest.approx((1.0, 1.0, 1.0), rel=1e-12)


def test_band_principal_curvatures(metric_23):
    rr = np.linspace(0.25, HALF_PI - 0.25, 101)
    K23, K13, K12 = metric_23.principal_curvatures(rr)
    for K in (K23, K13, K12):
        assert np.max(np.abs(K - 1.0)) < 1e-9


def test_collar_curvatures(metric_23):
    # inside the theta-core collar the t-profile is still exactly cos(r)/2
    K23, K13, K12 = metric_23.principal_curvatures(0.1)
    assert K13 == pytest.approx(1.0, rel=1e-14)
    assert K12 > 0 and K23 > 0


def test_positivity_of_sign_structure(metric_23):
    rr = np.linspace(metric_23.delta, HALF_PI - metric_23.delta, 3001)
    f, fp, h, hp = metric_23.coeffs(rr)
    fpp = metric_23.f(rr, 2)
    hpp = metric_23.h(rr, 2)
    assert np.all(f > 0) and np.all(fp > 0) and np.all(fpp < 0)
    assert np.all(h > 0) and np.all(hp < 0) and np.all(hpp < 0)


def test_sectional_curvature_round_random(metric_round):
    rng = np.random.default_rng(11)
    for _ in range(100):
        r = rng.uniform(2e-3, HALF_PI - 2e-3)
        K = metric_round.sectional_curvature((r, 0, 0), rng.normal(size=3),
                                             rng.normal(size=3))
        assert K == pytest.approx(1.0, abs=1e-9)


def test_sectional_coordinate_planes(metric_23):
    r = 0.4
    K23, K13, K12 = metric_23.principal_curvatures(r)
    e1, e2, e3 = np.eye(3)
    assert metric_23.sectional_curvature((r, 0, 0), e1, e2) == pytest.approx(K12, rel=1e-12)
    assert metric_23.sectional_curvature((r, 0, 0), e1, e3) == pytest.approx(K13, rel=1e-12)
    assert metric_23.sectional_curvature((r, 0, 0), e2, e3) == pytest.approx(K23, rel=1e-12)


def test_degenerate_plane(metric_23):
    u = np.array([1.0, 2.0, 3.0])
    with pytest.raises(wk.DegeneratePlane):
        metric_23.sectional_curvature((0.5, 0, 0), u, 2.0 * u)


# the double-FD probe at the prescribed 1e-5 step has a roundoff floor of
# about u/step^2 ~ 1e-6; 3e-6 leaves headroom over it without weakening the
# binding 1e-5 agreement contract


def test_fd_oracle_round(metric_round):
    rng = np.random.default_rng(2)
    for _ in range(20):
        r = rng.uniform(0.05, HALF_PI - 0.05)
        k = wk.fd_curvature_oracle(metric_round, (r, 0, 0), rng.normal(size=3),
                                   rng.normal(size=3))
        assert k == pytest.approx(1.0, abs=3e-6)


def test_fd_oracle_band(metric_23):
    rng = np.random.default_rng(3)
    for _ in range(20):
        r = rng.uniform(0.3, HALF_PI - 0.3)
        k = wk.fd_curvature_oracle(metric_23, (r, 0, 0), rng.normal(size=3),
                                   rng.normal(size=3))
        assert k == pytest.approx(1.0, abs=3e-6)


def test_fd_oracle_matches_closed_forms(metric_23):
    """Dual-route agreement at random points and planes off the dive slivers."""
    rng = np.random.default_rng(5)
    steep = metric_23.steep_intervals()
    taken = 0
    while taken < 200:
        r = float(rng.uniform(metric_23.delta + 5e-5, HALF_PI - metric_23.delta - 5e-5))
        if any(lo - 1e-4 <= r <= hi + 1e-4 for lo, hi in steep):
            continue
        u, v = rng.normal(size=3), rng.normal(size=3)
        kc = metric_23.sectional_curvature((r, 0, 0), u, v)
        kf = wk.fd_curvature_oracle(metric_23, (r, 0, 0), u, v)
        assert abs(kc - kf) <= 1e-5 * max(1.0, abs(kc)), (r, kc, kf)
        taken += 1


def test_fd_oracle_across_tail_seam(metric_23):
    """Self-consistency where the transition joins the scaled-sine tail."""
    b = metric_23.fprof.b
    rng = np.random.default_rng(8)
    for r in (b - 1e-4, b, b + 1e-4):
        u, v = rng.normal(size=3), rng.normal(size=3)
        kc = metric_23.sectional_curvature((r, 0, 0), u, v)
        kf = wk.fd_curvature_oracle(metric_23, (r, 0, 0), u, v)
        assert abs(kc - kf) <= 1e-5 * max(1.0, abs(kc))


def test_offdiagonal_riemann_vanishes(metric_23):
    for r in (0.2, 0.8, 1.3):
        R = frame_riemann_fd(metric_23, r)
        for i in range(3):
            for j in range(3):
                if i == j:
                    continue
                k = 3 - i - j
                assert abs(R[k, i, j, j]) < 1e-6


def test_curvature_scan_certificate(metric_23):
    rep = wk.curvature_scan(metric_23, 2001)
    assert rep.passed
    assert rep.min_curvature > 0.0
    assert rep.band_max_deviation < 1e-9
    assert rep.offdiag_max < 1e-6


def test_curvature_scan_round(metric_round):
    rep = wk.curvature_scan(metric_round, 501)
    assert rep.passed
    assert rep.min_curvature == pytest.approx(1.0, abs=1e-12)


def test_curvature_scan_other_orders():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        M = wk.build_metric(5, 7, 0.2)
    rep = wk.curvature_scan(M, 501)
    assert rep.min_curvature > 0.0
    assert rep.band_max_deviation < 1e-9


def test_scan_csv_roundtrip(tmp_path, metric_23):
    rep = wk.curvature_scan(metric_23, 501)
    path = tmp_path / "curv.csv"
    rep.to_csv(path)
    data = np.genfromtxt(path, delimiter=",", names=True)
    assert set(data.dtype.names) == {"r", "K23", "K13", "K12"}
    assert np.allclose(data["K12"], rep.K12)
