"""Geodesic flow of the doubly warped quotient metric.

Unit-speed geodesics of g = dr^2 + f^2 dtheta^2 + h^2 dt^2 satisfy

    r''     =  f f' theta'^2 + h h' t'^2
    theta'' = -2 (f'/f) r' theta'
    t''     = -2 (h'/h) r' t'

with three first integrals: the energy E = r'^2 + f^2 theta'^2 + h^2 t'^2
and the angular momenta p_theta = f^2 theta', p_t = h^2 t' of the two
rotational symmetries.  Integration is adaptive (DOP853, embedded order 8
with dense output); the integrals are monitored at every accepted step and
never enforced, so their drift is an honest quality measure.

Constant-radius geodesics exist exactly where the slope

    nu(r) = sqrt(-h h' / (f f'))

matches |p/q| of the prescribed winding pair: nu runs from 1/m at the
theta-core to n at the t-core and equals n/m identically on the round
middle band, which is therefore a continuum of closed (n, m)-winding
geodesics.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import DOP853
from scipy.optimize import brentq, minimize_scalar

from .curves import Curve
from .errors import (
    CoreApproach,
    CoreSingularity,
    DriftAbort,
    NoSolution,
    NotClosed,
    NotCoprime,
    TooFewSamples,
    WindingAmbiguous,
)
from .metric import QuotientMetric
from .warp import HALF_PI

TWO_PI = 2.0 * math.pi

#: relaxed core guard for the purely algebraic slope ratio
SLOPE_DELTA = 1e-4

#: rounding guard for winding numbers
WINDING_GUARD = 1e-3


@dataclass
class GeodesicState:
    r: float
    theta: float
    t: float
    vr: float
    vtheta: float
    vt: float

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.theta, self.t, self.vr, self.vtheta, self.vt])

    @classmethod
    def from_array(cls, y) -> "GeodesicState":
        return cls(*(float(v) for v in y))


def first_integrals(metric: QuotientMetric, state: GeodesicState) -> tuple[float, float, float]:
    """(E, p_theta, p_t) of a tangent vector."""
    f = float(metric.f(state.r))
    h = float(metric.h(state.r))
    E = state.vr**2 + f**2 * state.vtheta**2 + h**2 * state.vt**2
    return E, f**2 * state.vtheta, h**2 * state.vt


def geodesic_rhs(metric: QuotientMetric, state: GeodesicState) -> np.ndarray:
    """State derivative (r', theta', t', r'', theta'', t'')."""
    r = state.r
    d = metric.delta
    if not (d < r < HALF_PI - d):
        raise CoreSingularity(f"r={r} inside the core exclusion zone")
    ffp, hhp, fp_f, hp_h = metric.rhs_coeffs(r)
    return np.array([
        state.vr, state.vtheta, state.vt,
        ffp * state.vtheta**2 + hhp * state.vt**2,
        -2.0 * fp_f * state.vr * state.vtheta,
        -2.0 * hp_h * state.vr * state.vt,
    ])


@dataclass
class ConservationReport:
    drift_E: float
    drift_ptheta: float
    drift_pt: float
    n_steps: int
    min_step: float
    max_step: float
    mean_step: float
    arclength: float
    tol: float
    abort_threshold: float

    @property
    def max_drift(self) -> float:
        return max(self.drift_E, self.drift_ptheta, self.drift_pt)

    @property
    def passed(self) -> bool:
        return self.max_drift < self.abort_threshold

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("indent", 2)
        kwargs.setdefault("sort_keys", True)
        d = {k: getattr(self, k) for k in (
            "drift_E", "drift_ptheta", "drift_pt", "n_steps", "min_step",
            "max_step", "mean_step", "arclength", "tol", "abort_threshold")}
        d["max_drift"] = self.max_drift
        d["passed"] = bool(self.passed)
        return json.dumps(d, **kwargs)


def integrate_geodesic(metric: QuotientMetric, init: GeodesicState, length: float,
                       tol: float = 1e-10, *, n_samples: int | None = None,
                       drift_abort: float = 1e-7) -> tuple[Curve, ConservationReport]:
    """Flow ``init`` for the given arclength with local error tolerance tol.

    Dense output is resampled at uniform arclength.  The three first
    integrals are checked after every accepted step; DriftAbort fires if
    any relative drift exceeds ``drift_abort``, CoreApproach if the radius
    enters the excluded zone (the exception carries the exit state).
    """
    if tol <= 0 or length <= 0:
        raise ValueError("length and tol must be positive")
    d = metric.delta
    y0 = init.as_array() if isinstance(init, GeodesicState) else np.asarray(init, float)
    if not (d < y0[0] < HALF_PI - d):
        raise CoreSingularity(f"initial radius {y0[0]} inside the core exclusion zone")

    def fun(s, y):
        r = y[0]
        ffp, hhp, fp_f, hp_h = metric.rhs_coeffs(r)
        return (y[3], y[4], y[5],
                ffp * y[4] * y[4] + hhp * y[5] * y[5],
                -2.0 * fp_f * y[3] * y[4],
                -2.0 * hp_h * y[3] * y[5])

    def invariants(y):
        f, _ = metric.fprof.value_and_slope(y[0])
        hs, _ = metric.hprof.value_and_slope(HALF_PI - y[0])
        return (y[3] * y[3] + f * f * y[4] * y[4] + hs * hs * y[5] * y[5],
                f * f * y[4], hs * hs * y[5])

    ref = invariants(y0)
    scale = [max(abs(v), 1e-9) for v in ref]
    # the controller targets well below the requested tolerance: `tol` bounds
    # the admissible local error, and round-trip reversibility at the
    # documented 1e-7 level over arclength ~10^2 needs the headroom
    solver = DOP853(fun, 0.0, y0, t_bound=length, rtol=tol / 16.0,
                    atol=tol * 1e-2)
    segments = []
    steps = []
    drifts = [0.0, 0.0, 0.0]
    while solver.status == "running":
        msg = solver.step()
        if solver.status == "failed":
            raise DriftAbort(f"integrator failed: {msg}")
        seg = solver.dense_output()
        segments.append(seg)
        steps.append(solver.t - seg.t_min)
        y = solver.y
        r_now = y[0]
        r_mid = seg(0.5 * (seg.t_min + seg.t_max))[0]
        if not (d < r_now < HALF_PI - d) or not (d < r_mid < HALF_PI - d):
            raise CoreApproach(
                f"trajectory entered the core zone at s={solver.t:.6g}",
                state=GeodesicState.from_array(y), arclength=float(solver.t))
        cur = invariants(y)
        for i in range(3):
            drifts[i] = max(drifts[i], abs(cur[i] - ref[i]) / scale[i])
        if max(drifts) > drift_abort:
            raise DriftAbort(
                f"first-integral drift {max(drifts):.3e} exceeded {drift_abort:.3e} "
                f"at s={solver.t:.6g}")

    if n_samples is None:
        n_samples = int(np.clip(round(length / 0.0015), 1024, 2**17)) + 1
    ss = np.linspace(0.0, length, n_samples)
    ends = np.array([seg.t_max for seg in segments])
    idx = np.clip(np.searchsorted(ends, ss, side="left"), 0, len(segments) - 1)
    Y = np.empty((n_samples, 6))
    for k in np.unique(idx):
        sel = idx == k
        Y[sel] = segments[k](ss[sel]).T
    curve = Curve(s=ss, r=Y[:, 0], theta=Y[:, 1], t=Y[:, 2],
                  vr=Y[:, 3], vtheta=Y[:, 4], vt=Y[:, 5],
                  meta={"kind": "integrated", "tol": tol, "length": length})
    steps_arr = np.asarray(steps)
    report = ConservationReport(
        drift_E=float(drifts[0]), drift_ptheta=float(drifts[1]),
        drift_pt=float(drifts[2]),
        n_steps=len(steps), min_step=float(steps_arr.min()),
        max_step=float(steps_arr.max()), mean_step=float(steps_arr.mean()),
        arclength=length, tol=tol, abort_threshold=drift_abort)
    return curve, report


def torus_slope(metric: QuotientMetric, r):
    """nu(r) = sqrt(-h h' / (f f')): the vtheta/vt ratio that freezes r."""
    rr = np.asarray(r, dtype=float)
    scalar = rr.ndim == 0
    rr = np.atleast_1d(rr)
    if np.any(rr <= SLOPE_DELTA) or np.any(rr >= HALF_PI - SLOPE_DELTA):
        raise CoreSingularity("slope requested too close to a core circle")
    f, fp, h, hp = metric.coeffs(rr)
    nu = np.sqrt(-(h * hp) / (f * fp))
    return float(nu[0]) if scalar else nu


def balanced_state(metric: QuotientMetric, r0: float, p_sign: int = 1,
                   q_sign: int = 1) -> GeodesicState:
    """Unit-speed state at radius r0 with the r-freezing velocity ratio."""
    nu = float(torus_slope(metric, r0))
    f = float(metric.f(r0))
    h = float(metric.h(r0))
    vt = 1.0 / math.sqrt(f * f * nu * nu + h * h)
    return GeodesicState(r=r0, theta=0.0, t=0.0, vr=0.0,
                         vtheta=math.copysign(nu * vt, p_sign),
                         vt=math.copysign(vt, q_sign))


@dataclass
class ClosureResult:
    closed: bool
    period: float
    windings: tuple[int, int]
    mismatch: float

    def to_dict(self) -> dict:
        return {"closed": self.closed, "period": self.period,
                "windings": list(self.windings), "mismatch": self.mismatch}


def _wrap(x):
    return (np.asarray(x) + math.pi) % TWO_PI - math.pi


def closure_check(curve: Curve, tol: float = 1e-6) -> ClosureResult:
    """Smallest period at which the full state returns within tol.

    The state distance is the max-norm over (r, theta mod 2*pi, t mod 2*pi,
    vr, vtheta, vt); candidate sample minima are refined on the curve's
    Hermite interpolant.  Windings are the unwrapped angle increments over
    one period divided by 2*pi, rounded under a 1e-3 guard.
    """
    if not curve.has_velocities:
        raise TooFewSamples("closure detection needs velocity samples")
    if len(curve) < 16:
        raise TooFewSamples("closure detection needs at least 16 samples")
    x0 = curve.state(0)

    comp = np.empty((len(curve), 6))
    comp[:, 0] = curve.r - x0[0]
    comp[:, 1] = _wrap(curve.theta - x0[1])
    comp[:, 2] = _wrap(curve.t - x0[2])
    comp[:, 3] = curve.vr - x0[3]
    comp[:, 4] = curve.vtheta - x0[4]
    comp[:, 5] = curve.vt - x0[5]
    dist = np.max(np.abs(comp), axis=1)

    ds = curve.ds
    s_min = 10.0 * ds
    cand = []
    for i in range(1, len(curve) - 1):
        if curve.s[i] < s_min:
            continue
        if dist[i] <= dist[i - 1] and dist[i] <= dist[i + 1] and dist[i] < 0.2:
            cand.append(i)
    if len(curve) >= 2 and curve.s[-1] >= s_min and dist[-1] <= dist[-2] and dist[-1] < 0.2:
        cand.append(len(curve) - 1)

    def hermite_dist(s):
        x = curve.hermite_state(float(s))
        return max(abs(x[0] - x0[0]), abs(float(_wrap(x[1] - x0[1]))),
                   abs(float(_wrap(x[2] - x0[2]))),
                   abs(x[3] - x0[3]), abs(x[4] - x0[4]), abs(x[5] - x0[5]))

    for i in cand:
        lo = max(curve.s[max(i - 2, 0)], s_min)
        hi = min(curve.s[min(i + 2, len(curve) - 1)], float(curve.s[-1]))
        res = minimize_scalar(hermite_dist, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-14})
        # the bounded minimizer stalls near boundary minima; compare against
        # the raw candidates
        best_s, best_d = float(res.x), float(res.fun)
        for s_try in (float(curve.s[i]), lo, hi):
            d_try = hermite_dist(s_try)
            if d_try < best_d:
                best_s, best_d = s_try, d_try
        if best_d < tol:
            period = best_s
            x = curve.hermite_state(period)
            wind = []
            for dtheta in (x[1] - x0[1], x[2] - x0[2]):
                k = dtheta / TWO_PI
                if abs(k - round(k)) > WINDING_GUARD:
                    raise WindingAmbiguous(
                        f"angle increment {k:.6f} turns is {abs(k - round(k)):.2e} "
                        f"from an integer (guard {WINDING_GUARD})")
                wind.append(int(round(k)))
            return ClosureResult(closed=True, period=period,
                                 windings=(wind[0], wind[1]), mismatch=best_d)
    raise NotClosed(f"no return within tol={tol} over arclength {curve.s[-1]:.6g}")


def geodesic_residual(metric: QuotientMetric, curve: Curve) -> float:
    """Max-norm geodesic-equation residual of a sampled curve.

    Both derivatives are taken by central differences of the sampled
    positions (the stored velocities are deliberately not used), the
    Christoffel contraction added, and the result measured in the
    orthonormal frame.  Small residual certifies the curve is a geodesic
    independently of how it was produced.
    """
    if len(curve) < 256:
        raise TooFewSamples(f"need at least 256 samples, got {len(curve)}")
    ds = curve.ds
    r, th, tt = curve.r, curve.theta, curve.t
    rd = (r[2:] - r[:-2]) / (2 * ds)
    thd = (th[2:] - th[:-2]) / (2 * ds)
    td = (tt[2:] - tt[:-2]) / (2 * ds)
    rdd = (r[2:] - 2 * r[1:-1] + r[:-2]) / ds**2
    thdd = (th[2:] - 2 * th[1:-1] + th[:-2]) / ds**2
    tdd = (tt[2:] - 2 * tt[1:-1] + tt[:-2]) / ds**2
    ri = r[1:-1]
    f, fp, h, hp = metric.coeffs(ri)
    res_r = rdd - (f * fp * thd**2 + h * hp * td**2)
    res_th = thdd + 2.0 * (fp / f) * rd * thd
    res_t = tdd + 2.0 * (hp / h) * rd * td
    frame = np.vstack([res_r, f * res_th, h * res_t])
    return float(np.max(np.abs(frame)))


@dataclass
class TorusRoot:
    radius: float
    curve: Curve
    closure: ClosureResult | None
    balance_residual: float
    confirmed_by_integration: bool
    residual: float | None = None


@dataclass
class TorusGeodesicResult:
    p: int
    q: int
    roots: list[TorusRoot]


@dataclass
class DegenerateBand:
    """A continuum of constant-radius solutions (flat family of tori)."""

    p: int
    q: int
    band: tuple[float, float]
    representative: TorusRoot
    extra_roots: list[TorusRoot] = field(default_factory=list)


def _make_torus_root(metric: QuotientMetric, r0: float, p: int, q: int,
                     tol: float) -> TorusRoot:
    state = balanced_state(metric, r0, p_sign=1 if p >= 0 else -1,
                           q_sign=1 if q >= 0 else -1)
    ffp, hhp, _, _ = metric.rhs_coeffs(r0)
    balance = abs(ffp * state.vtheta**2 + hhp * state.vt**2)
    d = metric.delta
    inside = d * 1.05 < r0 < HALF_PI - d * 1.05
    if inside:
        period_guess = TWO_PI * max(abs(p), 1) / max(abs(state.vtheta), 1e-12)
        curve, _ = integrate_geodesic(metric, state, 1.2 * period_guess, tol=1e-11,
                                      n_samples=8193)
        closure = closure_check(curve, tol=max(tol, 1e-6))
        resid = geodesic_residual(metric, curve)
        return TorusRoot(radius=r0, curve=curve, closure=closure,
                         balance_residual=balance, confirmed_by_integration=True,
                         residual=resid)
    # representative inside the core-exclusion zone: report the analytic
    # constant-radius solution without flowing it
    period = TWO_PI * max(abs(p), 1) / max(abs(state.vtheta), 1e-12)
    ss = np.linspace(0.0, 1.05 * period, 4097)
    curve = Curve(s=ss, r=np.full_like(ss, r0),
                  theta=state.vtheta * ss, t=state.vt * ss,
                  vr=np.zeros_like(ss),
                  vtheta=np.full_like(ss, state.vtheta),
                  vt=np.full_like(ss, state.vt),
                  meta={"kind": "analytic_torus_geodesic", "radius": r0})
    closure = closure_check(curve, tol=max(tol, 1e-6))
    return TorusRoot(radius=r0, curve=curve, closure=closure,
                     balance_residual=balance, confirmed_by_integration=False,
                     residual=None)


def find_torus_geodesic(metric: QuotientMetric, p: int, q: int, *,
                        grid: int = 20001, tol: float = 1e-6):
    """Constant-radius geodesics with winding pair (p, q).

    Solves nu(r) = |p/q| over a dense radius grid: isolated sign changes
    are refined by bisection; runs where the equation holds identically
    (the round middle band, or an exact-sine plateau at a core) are
    reported as a DegenerateBand with a representative at the midpoint.
    Raises NoSolution when the target is outside nu's range, NotCoprime
    for an imprimitive pair.
    """
    if p == 0 and q == 0:
        raise ValueError("winding pair must be nonzero")
    g = math.gcd(abs(p), abs(q))
    if g > 1:
        raise NotCoprime(g, (p // g, q // g))
    if p == 0 or q == 0:
        raise NoSolution(f"slope {p}/{q} outside the range of nu")
    target = abs(p) / abs(q)

    rr = np.linspace(SLOPE_DELTA * 1.5, HALF_PI - SLOPE_DELTA * 1.5, grid)
    nu = torus_slope(metric, rr)
    resid = nu - target

    flat = np.abs(resid) <= 1e-10 * max(1.0, target)
    runs = []
    i = 0
    while i < len(rr):
        if flat[i]:
            j = i
            while j + 1 < len(rr) and flat[j + 1]:
                j += 1
            if j - i + 1 >= 5:
                runs.append((i, j))
            i = j + 1
        else:
            i += 1

    in_run = np.zeros(len(rr), dtype=bool)
    for (i0, j0) in runs:
        in_run[i0:j0 + 1] = True

    radii = []
    for k in range(len(rr) - 1):
        if in_run[k] or in_run[k + 1]:
            continue
        if resid[k] == 0.0:
            radii.append(float(rr[k]))
        elif resid[k] * resid[k + 1] < 0.0:
            root = brentq(lambda r: float(torus_slope(metric, r)) - target,
                          rr[k], rr[k + 1], xtol=1e-14, rtol=8.9e-16)
            radii.append(float(root))
    radii = sorted(set(round(r, 12) for r in radii))

    if runs:
        i0, j0 = max(runs, key=lambda ij: ij[1] - ij[0])
        band = (float(rr[i0]), float(rr[j0]))
        rep = _make_torus_root(metric, 0.5 * (band[0] + band[1]), p, q, tol)
        extras = [_make_torus_root(metric, r, p, q, tol) for r in radii]
        return DegenerateBand(p=p, q=q, band=band, representative=rep,
                              extra_roots=extras)
    if not radii:
        raise NoSolution(
            f"slope {abs(p)}/{abs(q)} = {target:.6g} not attained: nu ranges over "
            f"[{nu.min():.6g}, {nu.max():.6g}]")
    roots = [_make_torus_root(metric, r, p, q, tol) for r in radii]
    return TorusGeodesicResult(p=p, q=q, roots=roots)
