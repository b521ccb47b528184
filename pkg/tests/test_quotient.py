import cmath
import math

import numpy as np
import pytest

import warpknot as wk
from warpknot.quotient import embed_curve

TWO_PI = 2 * math.pi


def test_point_on_first_core():
    p = wk.quotient_map(2, 3, 1.0, 0.0)
    assert p.r == 0.0 and p.t == 0.0
    assert p.theta == 0.0  # canonicalized where undefined


def test_point_on_second_core():
    p = wk.quotient_map(2, 3, 0.0, 1j)
    assert p.r == pytest.approx(math.pi / 2, rel=1e-15)
    assert p.t == 0.0  # canonicalized where undefined


def test_direct_evaluation():
    z1 = 1j / math.sqrt(2)
    z2 = 1 / math.sqrt(2)
    p = wk.quotient_map(2, 3, z1, z2)
    assert p.r == pytest.approx(math.pi / 4, rel=1e-14)
    assert p.t == pytest.approx(math.pi, rel=1e-14)
    assert p.theta == pytest.approx(0.0, abs=1e-14)


def test_norm_check():
    with pytest.raises(wk.NotOnSphere):
        wk.quotient_map(2, 3, 1.0, 0.5)


def test_deck_invariance_brute_force():
    """All m*n deck transformations leave the image fixed."""
    m, n = 2, 3
    rng = np.random.default_rng(17)
    for _ in range(25):
        z = rng.normal(size=4)
        z /= np.linalg.norm(z)
        z1 = complex(z[0], z[1])
        z2 = complex(z[2], z[3])
        base = wk.quotient_map(m, n, z1, z2)
        for k in range(m):
            for l in range(n):
                w1 = z1 * cmath.exp(2j * math.pi * k / m)
                w2 = z2 * cmath.exp(2j * math.pi * l / n)
                p = wk.quotient_map(m, n, w1, w2)
                assert p.r == pytest.approx(base.r, abs=1e-12)
                dth = (p.theta - base.theta + math.pi) % TWO_PI - math.pi
                dt = (p.t - base.t + math.pi) % TWO_PI - math.pi
                assert abs(dth) < 1e-12
                assert abs(dt) < 1e-12


def test_hopf_image_windings():
    c = wk.hopf_circle_image(2, 3, 1.0, rho=0.25)
    assert c.meta["radius"] == pytest.approx(math.pi / 4, rel=1e-14)
    p, q = wk.winding_numbers(c)
    assert (p, q) == (3, 2)


def test_hopf_image_conjugated_flips_theta():
    c = wk.hopf_circle_image(2, 3, 1.0, rho=0.25, conjugated=True)
    p, q = wk.winding_numbers(c)
    assert (p, q) == (-3, 2)


def test_hopf_image_trivial_orders():
    c = wk.hopf_circle_image(1, 1, 1.0, rho=0.25)
    assert wk.winding_numbers(c) == (1, 1)


def test_collar_violation():
    with pytest.raises(wk.CollarViolation):
        wk.hopf_circle_image(2, 3, 1e6, rho=0.25)
    with pytest.raises(wk.CollarViolation):
        wk.hopf_circle_image(2, 3, 1e-6, rho=0.25)


def test_hopf_phase_only_shifts_start():
    lam = cmath.exp(0.7j)
    c = wk.hopf_circle_image(2, 3, lam, rho=0.25)
    assert c.meta["radius"] == pytest.approx(math.pi / 4, rel=1e-14)
    assert wk.winding_numbers(c) == (3, 2)


def test_hopf_image_length(metric_23):
    """Quotient image of a unit-speed great circle keeps length 2*pi."""
    c = wk.hopf_circle_image(2, 3, 1.0, rho=0.25)
    assert wk.curve_length(c, metric_23) == pytest.approx(TWO_PI, abs=1e-8)


def test_embed_r3_values():
    assert wk.embed_r3((0.0, 0.0, 0.0)) == pytest.approx((2.0, 0.0, 0.0))
    x, y, z = wk.embed_r3((math.pi / 4, 0.0, math.pi))
    assert x == pytest.approx(-(2 + math.pi / 4), rel=1e-14)
    assert y == pytest.approx(0.0, abs=1e-12)
    assert z == pytest.approx(0.0, abs=1e-14)


def test_embedded_curve_closes():
    c = wk.hopf_circle_image(2, 3, 1.0, rho=0.25)
    xyz = embed_curve(c)
    assert np.linalg.norm(xyz[0] - xyz[-1]) < 1e-9


def test_sample_count_guard():
    with pytest.raises(ValueError):
        wk.hopf_circle_image(2, 3, 1.0, samples=16)
