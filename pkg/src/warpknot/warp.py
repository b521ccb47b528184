"""Concave warping profiles interpolating sin(r) and sin(r)/n.

A profile is the increasing, strictly concave function sigma on [0, pi/2]
with

    sigma(r) = sin(r)        on [0, a]        (round closure at the core)
    sigma(r) = sin(r) / n    on [b, pi/2]     (descended round profile)

and all derivatives matching at the seams r = a and r = b.  It is built
through its derivative

    sigma'(r) = cos(r) * n**(-H(r)),

where H climbs from 0 to 1 across the transition zone [a, b] in two stages:
a narrow entry step F (the "dive", where the cone-angle reduction happens)
followed by a slow relaxation 1 + s*D (the "glide").  Matching the tail
forces sigma' to undershoot cos(r)/n in between -- a monotone interpolation
of the derivative cannot satisfy the area constraint

    integral_a^b sigma' = sin(b)/n - sin(a),

because any sigma' pinched between cos(r)/n and cos(r) integrates to more
than the target.  The undershoot amplitude s > 0 is the single free shape
parameter and is fixed by a bracketed root-find on the area constraint.

Concavity is equivalent to the slope bound H'(r) > -tan(r)/ln(n).  The dive
only increases H; the glide relaxes along the marginal direction
eta(r) = ln(cos r / cos b), rescaled through a low-gain step, so the margin
is controlled by construction and verified on a dense grid before a profile
is accepted.  The exact-sine zone [0, a] must be small: feasibility of the
area constraint requires sin(a) < sin(b)/n - (b - a) cos(b)/n, whose
right-hand side is of order b^3/n.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import DomainError, InfeasibleZone, NoRoot
from .smoothstep import (
    FLAT_MARGIN,
    flat_step,
    flat_step_deriv,
    smooth_step,
    smooth_step_deriv,
)

HALF_PI = math.pi / 2.0

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)

#: minimum admissible exact-sine zone before the construction gives up
A_FLOOR = 1e-6

#: required concavity margin: Q(r) >= CONCAVITY_MARGIN * tan(r) on the glide
CONCAVITY_MARGIN = 0.03

BLEND_ID = "dive-glide/flat{:.2f}/v1".format(FLAT_MARGIN)


@dataclass(frozen=True)
class WarpProfile:
    """Frozen, immutable warping profile; evaluations are pure functions.

    Fields
    ------
    n       : cone-angle divisor (quotient order), n >= 1
    rho     : collar radius; the profile equals sin(r)/n for r >= b < rho
    a       : end of the exact-sine zone
    b       : start of the exact scaled-sine tail (0.9 * rho)
    w       : dive width as a fraction of b - a
    s       : glide undershoot amplitude (root-found)
    blend   : identifier of the transition family
    """

    n: int
    rho: float
    a: float
    b: float
    w: float
    s: float
    blend: str = BLEND_ID
    _edges: np.ndarray = field(default=None, repr=False, compare=False)
    _prefix: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.n > 1:
            edges, prefix = _transition_panels(self)
            object.__setattr__(self, "_edges", edges)
            object.__setattr__(self, "_prefix", prefix)

    # -- transition internals ------------------------------------------------

    @property
    def dive_end(self) -> float:
        return self.a + self.w * (self.b - self.a)

    @property
    def steep_interval(self) -> tuple[float, float]:
        """Interval where sigma varies on the dive scale.

        Finite-difference probes with steps comparable to the dive width are
        unreliable here; curvature in this sliver should be taken from the
        closed forms.
        """
        return (self.a, self.dive_end)

    @property
    def _glide_log_span(self) -> float:
        return math.log(math.cos(self.dive_end) / math.cos(self.b))

    def _H_and_slope(self, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Transition exponent H(r) and dH/dr on a <= r <= b."""
        a, b, w = self.a, self.b, self.w
        width = b - a
        x = (r - a) / width
        F = smooth_step(x / w)
        Fp = smooth_step_deriv(x / w) / (w * width)
        L = self._glide_log_span
        eta = np.log(np.cos(r) / math.cos(b)) / L
        D = flat_step(eta)
        Dp = flat_step_deriv(eta) * (-np.tan(r) / L)
        H = F * (1.0 + self.s * D)
        Hp = Fp * (1.0 + self.s * D) + F * self.s * Dp
        return H, Hp

    def _mu(self, r: np.ndarray) -> np.ndarray:
        H, _ = self._H_and_slope(r)
        return float(self.n) ** (-H)

    def _sigma_p_transition(self, r: np.ndarray) -> np.ndarray:
        return np.cos(r) * self._mu(r)

    def _sigma_pp_transition(self, r: np.ndarray) -> np.ndarray:
        H, Hp = self._H_and_slope(r)
        sp = np.cos(r) * float(self.n) ** (-H)
        return -sp * (np.tan(r) + math.log(self.n) * Hp)

    def _sigma_transition(self, r: np.ndarray) -> np.ndarray:
        """sigma on (a, b): panel prefix sums plus a partial 32-pt panel."""
        idx = np.searchsorted(self._edges, r, side="right") - 1
        idx = np.clip(idx, 0, len(self._edges) - 2)
        lo = self._edges[idx]
        half = 0.5 * (r - lo)
        mid = lo + half
        pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        vals = self._sigma_p_transition(pts.ravel()).reshape(pts.shape)
        partial = half * np.sum(_GL_WEIGHTS[None, :] * vals, axis=1)
        return math.sin(self.a) + self._prefix[idx] + partial

    # -- public evaluation ---------------------------------------------------

    def sigma(self, r, order: int = 0):
        """Evaluate sigma / sigma' / sigma'' by closed-form piecewise rules.

        Accepts scalars or arrays; raises DomainError outside [0, pi/2].
        """
        if order not in (0, 1, 2):
            raise ValueError(f"order must be 0, 1 or 2, got {order}")
        rr = np.asarray(r, dtype=float)
        scalar = rr.ndim == 0
        rr = np.atleast_1d(rr)
        if np.any(rr < -1e-12) or np.any(rr > HALF_PI + 1e-12):
            raise DomainError(f"r outside [0, pi/2]: {rr.min()}..{rr.max()}")
        rr = np.clip(rr, 0.0, HALF_PI)
        if self.n == 1:
            out = (np.sin(rr), np.cos(rr), -np.sin(rr))[order]
            return float(out[0]) if scalar else out

        out = np.empty_like(rr)
        head = rr <= self.a
        tail = rr >= self.b
        mid = ~(head | tail)
        if order == 0:
            out[head] = np.sin(rr[head])
            out[tail] = np.sin(rr[tail]) / self.n
            if mid.any():
                out[mid] = self._sigma_transition(rr[mid])
        elif order == 1:
            out[head] = np.cos(rr[head])
            out[tail] = np.cos(rr[tail]) / self.n
            if mid.any():
                out[mid] = self._sigma_p_transition(rr[mid])
        else:
            out[head] = -np.sin(rr[head])
            out[tail] = -np.sin(rr[tail]) / self.n
            if mid.any():
                out[mid] = self._sigma_pp_transition(rr[mid])
        return float(out[0]) if scalar else out

    def value_and_slope(self, r: float) -> tuple[float, float]:
        """Fast scalar (sigma, sigma') for flow right-hand sides."""
        if self.n == 1 or r >= self.b:
            ninv = 1.0 / self.n
            return math.sin(r) * ninv, math.cos(r) * ninv
        if r <= self.a:
            return math.sin(r), math.cos(r)
        rr = np.array([r])
        return float(self._sigma_transition(rr)[0]), float(self._sigma_p_transition(rr)[0])

    def transition_margin(self, grid: int = 20001) -> float:
        """min over the transition of Q(r)/tan(r), Q = -sigma''/sigma'.

        Positive iff sigma is strictly concave there; ~1 away from the glide.
        """
        if self.n == 1:
            return 1.0
        rr = np.linspace(self.a, self.b, grid)[1:-1]
        _, Hp = self._H_and_slope(rr)
        q = np.tan(rr) + math.log(self.n) * Hp
        return float(np.min(q / np.tan(rr)))

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "rho": self.rho,
            "a": self.a,
            "b": self.b,
            "w": self.w,
            "s": self.s,
            "blend": self.blend,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WarpProfile":
        return cls(n=int(d["n"]), rho=float(d["rho"]), a=float(d["a"]),
                   b=float(d["b"]), w=float(d["w"]), s=float(d["s"]),
                   blend=str(d.get("blend", BLEND_ID)))


def _transition_panels(p: WarpProfile) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature panel edges over [a, b] and prefix integrals of sigma'."""
    a, b = p.a, p.b
    r1 = p.dive_end
    post = min(b, r1 + 4.0 * (r1 - a))
    edges = np.concatenate([
        np.linspace(a, r1, 9),
        np.linspace(r1, post, 9)[1:],
        np.linspace(post, b, 33)[1:],
    ])
    mids = 0.5 * (edges[:-1] + edges[1:])
    halfs = 0.5 * np.diff(edges)
    pts = mids[:, None] + halfs[:, None] * _GL_NODES[None, :]
    vals = p._sigma_p_transition(pts.ravel()).reshape(pts.shape)
    panel = halfs * np.sum(_GL_WEIGHTS[None, :] * vals, axis=1)
    prefix = np.concatenate([[0.0], np.cumsum(panel)])
    return edges, prefix


def build_warp(n: int, rho: float, tolerance: float = 1e-12) -> WarpProfile:
    """Construct a warping profile for quotient order n and collar radius rho.

    The free amplitude s is root-found so that the transition integral hits
    sin(b)/n - sin(a) within ``tolerance``; the exact-sine zone [0, a] is
    auto-shrunk until the area constraint is attainable with a positive
    concavity margin.

    Raises InfeasibleZone when no zone above 1e-6 works, NoRoot when the
    amplitude cannot be bracketed or refined.
    """
    if n < 1 or int(n) != n:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if not (0.0 < rho < math.pi / 4):
        raise ValueError(f"rho must lie in (0, pi/4), got {rho}")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    n = int(n)
    if n == 1:
        return WarpProfile(n=1, rho=rho, a=rho, b=rho, w=0.0, s=0.0)

    b = 0.9 * rho
    bound = lambda a: math.sin(a) - (math.sin(b) / n - (b - a) * math.cos(b) / n)
    if bound(0.0) >= 0.0:
        raise InfeasibleZone(f"no exact-sine zone possible for n={n}, rho={rho}")
    a_bound = brentq(bound, 0.0, b)
    slack0 = (math.sin(b) - b * math.cos(b)) / n
    cost_rate = 0.5 * (1.0 - 1.0 / n)

    a_frac, w_scale = 0.75, 0.25
    bracket_failed = False
    for _ in range(12):
        a = min(rho / 10.0, a_frac * a_bound)
        if a < A_FLOOR:
            raise InfeasibleZone(
                f"exact-sine zone shrank below {A_FLOOR} for n={n}, rho={rho}")
        w = float(np.clip(w_scale * slack0 / ((b - a) * cost_rate), 5e-4, 0.05))
        target = math.sin(b) / n - math.sin(a)

        def area_residual(s: float) -> float:
            prof = WarpProfile(n=n, rho=rho, a=a, b=b, w=w, s=s)
            return float(prof._prefix[-1]) - target

        if area_residual(0.0) <= 0.0:
            a_frac *= 0.6
            continue
        s_hi, bracketed = 0.01, False
        while s_hi <= 128.0:
            if area_residual(s_hi) < 0.0:
                bracketed = True
                break
            s_hi *= 2.0
        if not bracketed:
            bracket_failed = True
            a_frac *= 0.6
            continue
        s = brentq(area_residual, 0.0, s_hi, xtol=1e-16, rtol=8.9e-16, maxiter=200)
        prof = WarpProfile(n=n, rho=rho, a=a, b=b, w=w, s=s)
        resid = abs(float(prof._prefix[-1]) - target)
        if resid > max(tolerance, 5e-15):
            raise NoRoot(f"area residual {resid:.3e} exceeds tolerance {tolerance:.3e}")
        if prof.transition_margin() >= CONCAVITY_MARGIN:
            return prof
        a_frac *= 0.6
        w_scale *= 0.7
    if bracket_failed:
        raise NoRoot(f"could not bracket the glide amplitude for n={n}, rho={rho}")
    raise InfeasibleZone(f"no admissible zone found for n={n}, rho={rho}")


def warp_eval(profile: WarpProfile, r, order: int = 0):
    """sigma(r), sigma'(r) or sigma''(r); scalar or vectorized."""
    return profile.sigma(r, order)


@dataclass
class WarpPropertyReport:
    """Grid verification of a profile's defining properties."""

    n: int
    rho: float
    a: float
    b: float
    s: float
    grid_size: int
    sigma_prime_min: float
    sigma_second_max: float
    seam_jumps_a: tuple[float, float, float]
    seam_jumps_b: tuple[float, float, float]
    matches_sine_near_zero: bool
    matches_scaled_sine_tail: bool
    sandwich_ok: bool
    integral_residual: float
    monotone_ok: bool = field(init=False)
    concave_ok: bool = field(init=False)
    seams_ok: bool = field(init=False)
    passed: bool = field(init=False)

    SEAM_TOL = 1e-8

    def __post_init__(self):
        self.monotone_ok = self.sigma_prime_min > 0.0
        self.concave_ok = self.sigma_second_max < 0.0
        self.seams_ok = max(*self.seam_jumps_a, *self.seam_jumps_b) < self.SEAM_TOL
        self.passed = (self.monotone_ok and self.concave_ok and self.seams_ok
                       and self.matches_sine_near_zero and self.matches_scaled_sine_tail
                       and self.sandwich_ok and abs(self.integral_residual) < 1e-10)

    def to_json(self, **kwargs) -> str:
        d = {k: getattr(self, k) for k in (
            "n", "rho", "a", "b", "s", "grid_size", "sigma_prime_min",
            "sigma_second_max", "matches_sine_near_zero", "matches_scaled_sine_tail",
            "sandwich_ok", "integral_residual", "monotone_ok", "concave_ok",
            "seams_ok", "passed")}
        d["seam_jumps_a"] = list(self.seam_jumps_a)
        d["seam_jumps_b"] = list(self.seam_jumps_b)
        kwargs.setdefault("indent", 2)
        kwargs.setdefault("sort_keys", True)
        return json.dumps(d, **kwargs)

    def to_text(self) -> str:
        ja, jb = self.seam_jumps_a, self.seam_jumps_b
        lines = [
            f"warp profile n={self.n} rho={self.rho:.6g} "
            f"(a={self.a:.6g}, b={self.b:.6g}, s={self.s:.6g})",
            f"  min sigma'  over grid : {self.sigma_prime_min: .6e}  (> 0: {self.monotone_ok})",
            f"  max sigma'' over grid : {self.sigma_second_max: .6e}  (< 0: {self.concave_ok})",
            f"  seam jumps @a (0,1,2) : {ja[0]:.2e} {ja[1]:.2e} {ja[2]:.2e}",
            f"  seam jumps @b (0,1,2) : {jb[0]:.2e} {jb[1]:.2e} {jb[2]:.2e}",
            f"  sin zone exact        : {self.matches_sine_near_zero}",
            f"  sin/n tail exact      : {self.matches_scaled_sine_tail}",
            f"  sandwich sin/n<=s<=sin: {self.sandwich_ok}",
            f"  area residual         : {self.integral_residual: .3e}",
            f"  PASSED                : {self.passed}",
        ]
        return "\n".join(lines)


def _seam_jumps(p: WarpProfile, seam: float, e: float) -> tuple[float, float, float]:
    """FD continuity probes across a seam, compared against closed forms."""
    sm, s0, sp = (float(p.sigma(seam - e)), float(p.sigma(seam)), float(p.sigma(seam + e)))
    d1 = (sp - sm) / (2.0 * e)
    d2 = (sp - 2.0 * s0 + sm) / (e * e)
    j1 = abs(d1 - float(p.sigma(seam, 1)))
    j2 = abs(d2 - float(p.sigma(seam, 2)))
    return j1, j2


def verify_warp(profile: WarpProfile, grid_size: int) -> WarpPropertyReport:
    """Check every defining property of a profile at grid resolution."""
    if grid_size < 100:
        raise ValueError("grid_size must be at least 100")
    p = profile
    rr = np.linspace(0.0, HALF_PI, grid_size)
    sig = p.sigma(rr)
    sig_p = p.sigma(rr, 1)
    sig_pp = p.sigma(rr, 2)

    prime_min = float(np.min(sig_p[rr < HALF_PI - 1e-12]))
    interior = (rr > 0.0) & (rr < HALF_PI)
    second_max = float(np.max(sig_pp[interior]))

    if p.n == 1:
        jumps_a = jumps_b = (0.0, 0.0, 0.0)
        zone_small = bool(np.all(sig == np.sin(rr)))
        zone_tail = zone_small
    else:
        # order-0 jumps are the piecewise evaluation mismatches at the seams
        j0_a = abs(float(p._sigma_transition(np.array([p.a]))[0]) - math.sin(p.a))
        j0_b = abs(float(p._sigma_transition(np.array([p.b]))[0]) - math.sin(p.b) / p.n)
        # steps chosen inside the mollifier-flat collars of each seam
        e_a = float(np.clip(0.025 * p.w * (p.b - p.a), 1e-7, 1e-4))
        e_b = float(np.clip(0.02 * FLAT_MARGIN * p._glide_log_span / math.tan(p.b),
                            1e-6, 1e-4))
        jumps_a = (j0_a,) + _seam_jumps(p, p.a, e_a)
        jumps_b = (j0_b,) + _seam_jumps(p, p.b, e_b)
        head = rr <= p.a
        tail = rr >= p.b
        zone_small = bool(np.all(sig[head] == np.sin(rr[head])))
        zone_tail = bool(np.all(sig[tail] == np.sin(rr[tail]) / p.n))

    sandwich = bool(np.all(sig <= np.sin(rr) + 1e-12)
                    and np.all(sig >= np.sin(rr) / p.n - 1e-12))

    if p.n == 1:
        integral_residual = 0.0
    else:
        pts = sorted({p.a, p.dive_end, p.b})
        val, _ = quad(lambda u: float(p.sigma(u, 1)), 0.0, p.rho,
                      points=pts, limit=300, epsabs=1e-13, epsrel=1e-13)
        integral_residual = val - math.sin(p.rho) / p.n

    return WarpPropertyReport(
        n=p.n, rho=p.rho, a=p.a, b=p.b, s=p.s, grid_size=grid_size,
        sigma_prime_min=prime_min, sigma_second_max=second_max,
        seam_jumps_a=jumps_a, seam_jumps_b=jumps_b,
        matches_sine_near_zero=zone_small, matches_scaled_sine_tail=zone_tail,
        sandwich_ok=sandwich, integral_residual=float(integral_residual),
    )
