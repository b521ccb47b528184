"""Coordinates on the cyclic quotient of the unit 3-sphere.

The sphere |z1|^2 + |z2|^2 = 1 in C^2 carries the commuting actions
z1 -> exp(2*pi*i*k/m) z1 and z2 -> exp(2*pi*i*l/n) z2 (coprime m, n).  Away
from the core circles K = {z2 = 0} and L = {z1 = 0}, points are coordinated
by r = arcsin|z2| (distance to K on the round sphere) together with the
quotient angles

    theta = n * arg(z2)  (mod 2*pi),    t = m * arg(z1)  (mod 2*pi),

which are exactly the deck-invariant combinations.  Tori r = const form the
standard genus-1 splitting; Hopf circles {z2 = lambda * z1} live on them
and their quotient images wind n times in theta and m times in t.
Conjugating z2 reverses the theta-winding, producing the mirror image.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .curves import Curve
from .errors import CollarViolation, NotOnSphere

HALF_PI = math.pi / 2.0
TWO_PI = 2.0 * math.pi

#: major radius of the solid-torus picture used for R^3 export
EMBED_R = 2.0


class QuotientPoint:
    """Point (r, theta, t) of the quotient; angles canonical in [0, 2*pi)."""

    __slots__ = ("r", "theta", "t")

    def __init__(self, r: float, theta: float, t: float):
        self.r = float(r)
        self.theta = float(theta) % TWO_PI
        self.t = float(t) % TWO_PI
        if self.r < 1e-15:
            self.theta = 0.0
        if self.r > HALF_PI - 1e-15:
            self.t = 0.0

    def __iter__(self):
        return iter((self.r, self.theta, self.t))

    def __repr__(self):
        return f"QuotientPoint(r={self.r:.12g}, theta={self.theta:.12g}, t={self.t:.12g})"


def quotient_map(m: int, n: int, z1: complex, z2: complex,
                 norm_tol: float = 1e-10) -> QuotientPoint:
    """Send a point of the unit sphere in C^2 to quotient coordinates."""
    z1 = complex(z1)
    z2 = complex(z2)
    norm2 = abs(z1) ** 2 + abs(z2) ** 2
    if abs(norm2 - 1.0) > norm_tol:
        raise NotOnSphere(f"|z1|^2 + |z2|^2 = {norm2!r} is not 1 within {norm_tol}")
    r = math.asin(min(abs(z2), 1.0))
    theta = n * cmath.phase(z2)
    t = m * cmath.phase(z1)
    return QuotientPoint(r, theta, t)


def hopf_circle_image(m: int, n: int, lam: complex, rho: float | None = None,
                      conjugated: bool = False, samples: int = 4096) -> Curve:
    """Quotient image of the Hopf circle {z2 = lambda * z1} (unit speed).

    With ``conjugated`` the circle is taken with respect to the conjugate
    complex structure (w1, w2) = (z1, conj(z2)); its image reverses the
    theta-winding.  The circle sits on the torus r = arcsin(|lambda| /
    sqrt(1 + |lambda|^2)); when ``rho`` is given, radii inside either
    modified collar are rejected.
    """
    if samples < 64:
        raise ValueError("need at least 64 samples")
    lam = complex(lam)
    a0 = 1.0 / math.sqrt(1.0 + abs(lam) ** 2)
    b0 = abs(lam) * a0
    r_star = math.asin(min(b0, 1.0))
    if rho is not None and not (rho < r_star < HALF_PI - rho):
        raise CollarViolation(
            f"circle radius r={r_star:.6g} outside the round band "
            f"({rho:.6g}, {HALF_PI - rho:.6g})")

    tau = np.linspace(0.0, TWO_PI, samples + 1)
    phase2 = cmath.phase(lam) if lam != 0 else 0.0
    z1 = a0 * np.exp(1j * tau)
    z2 = b0 * np.exp(1j * (tau + phase2))
    if conjugated:
        # circle of the conjugate structure: w2 = lambda * w1, z2 = conj(w2)
        z2 = np.conj(z2)

    rs = np.empty_like(tau)
    th = np.empty_like(tau)
    tt = np.empty_like(tau)
    for i in range(len(tau)):
        p = quotient_map(m, n, complex(z1[i]), complex(z2[i]))
        rs[i], th[i], tt[i] = p.r, p.theta, p.t
    th = np.unwrap(th)
    tt = np.unwrap(tt)

    sgn = -1.0 if conjugated else 1.0
    vth = np.full_like(tau, sgn * n)
    vt = np.full_like(tau, float(m))
    meta = {
        "kind": "hopf_image",
        "m": m, "n": n,
        "lambda_re": lam.real, "lambda_im": lam.imag,
        "conjugated": bool(conjugated),
        "radius": r_star,
        "expected_windings": [int(sgn * n), int(m)],
    }
    return Curve(s=tau, r=rs, theta=th, t=tt,
                 vr=np.zeros_like(tau), vtheta=vth, vt=vt, meta=meta)


def embed_r3(point) -> tuple[float, float, float]:
    """Solid-torus picture of the t-handle, for export only.

    x = (R + r cos(theta)) cos(t), y = (R + r cos(theta)) sin(t),
    z = r sin(theta), with R = 2.  Injective for r < pi/2; carries no
    metric meaning.
    """
    r, theta, t = (float(v) for v in point)
    w = EMBED_R + r * math.cos(theta)
    return (w * math.cos(t), w * math.sin(t), r * math.sin(theta))


def embed_curve(curve: Curve) -> np.ndarray:
    """Vectorized embed_r3 over curve samples, shape (N, 3)."""
    w = EMBED_R + curve.r * np.cos(curve.theta)
    return np.column_stack([
        w * np.cos(curve.t),
        w * np.sin(curve.t),
        curve.r * np.sin(curve.theta),
    ])


def curve_length(curve: Curve, metric) -> float:
    """Arclength of a sampled curve measured with the quotient metric."""
    f, _, h, _ = metric.coeffs(curve.r)
    if curve.has_velocities:
        speed2 = curve.vr**2 + f**2 * curve.vtheta**2 + h**2 * curve.vt**2
        return float(np.trapezoid(np.sqrt(speed2), curve.s))
    dr = np.diff(curve.r)
    dth = np.diff(curve.theta)
    dt = np.diff(curve.t)
    fm = 0.5 * (f[1:] + f[:-1])
    hm = 0.5 * (h[1:] + h[:-1])
    return float(np.sum(np.sqrt(dr**2 + fm**2 * dth**2 + hm**2 * dt**2)))
