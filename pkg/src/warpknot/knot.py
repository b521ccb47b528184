"""Torus-knot classification of closed curves by winding data.

Every closed curve this package classifies lies on a torus of the standard
genus-1 splitting of the quotient, so its isotopy class is determined by
the winding pair (p, q) around the two handles.  The pair is read off the
unwrapped angle histories.  Conventions:

  * (p, q) and (-p, -q) are the same knot (orientation reversal);
  * (p, q) and (-p, q) are mirror images, distinct whenever |p|, |q| >= 2
    (torus knots are invertible but chiral);
  * min(|p|, |q|) <= 1 is the unknot.

The Alexander polynomial

    Delta(x) = (x^{pq} - 1)(x - 1) / ((x^p - 1)(x^q - 1))

is computed by exact integer polynomial division.  It is mirror-blind, so
chirality is carried by the signed winding convention, not by Delta.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .curves import Curve
from .errors import NotCoprime, WindingAmbiguous

TWO_PI = 2.0 * math.pi

WINDING_GUARD = 1e-3


def winding_numbers(curve: Curve, period: float | None = None) -> tuple[int, int]:
    """Winding pair from unwrapped angle increments over one period.

    Uses the curve's full sampled span by default (appropriate after
    closure detection); pass ``period`` to restrict to one closed loop.
    """
    if period is None:
        th0, th1 = curve.theta[0], curve.theta[-1]
        t0, t1 = curve.t[0], curve.t[-1]
    else:
        x0 = curve.hermite_state(0.0)
        x1 = curve.hermite_state(period)
        th0, th1, t0, t1 = x0[1], x1[1], x0[2], x1[2]
    out = []
    for delta in (th1 - th0, t1 - t0):
        k = delta / TWO_PI
        if abs(k - round(k)) > WINDING_GUARD:
            raise WindingAmbiguous(
                f"{k:.6f} turns is {abs(k - round(k)):.2e} from an integer")
        out.append(int(round(k)))
    return out[0], out[1]


@dataclass(frozen=True)
class KnotType:
    """Normalized signed torus-knot label."""

    p: int
    q: int
    label: str
    chiral_pair: bool
    alexander: tuple[int, ...]

    @property
    def is_unknot(self) -> bool:
        return self.label == "unknot"

    @property
    def mirror_label(self) -> str:
        return mirror(self).label

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "label": self.label,
            "chiral_pair": self.chiral_pair,
            "alexander": list(self.alexander),
            "mirror_label": self.mirror_label,
        }

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("indent", 2)
        kwargs.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kwargs)


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    """Exact long division over the integers (ascending coefficients)."""
    num = list(num)
    dn = len(den) - 1
    lead = den[-1]
    q = [0] * (len(num) - dn)
    for k in range(len(num) - 1, dn - 1, -1):
        c = num[k]
        if c % lead != 0:
            raise ArithmeticError("non-integer quotient in exact division")
        coef = c // lead
        q[k - dn] = coef
        if coef:
            for j, dj in enumerate(den):
                num[k - dn + j] -= coef * dj
    return q, num[:dn] if dn else []


def _x_pow_minus_one(k: int) -> list[int]:
    out = [0] * (k + 1)
    out[0] = -1
    out[-1] = 1
    return out


def alexander_polynomial(p: int, q: int) -> list[int]:
    """Integer coefficients of Delta(x), ascending in x.

    Requires a coprime pair with |p|, |q| >= 2; degree is
    (|p| - 1)(|q| - 1) and Delta is palindromic with Delta(1) = 1.
    """
    a, b = abs(int(p)), abs(int(q))
    g = math.gcd(a, b)
    if g != 1:
        raise NotCoprime(g, (p // g, q // g))
    if a < 2 or b < 2:
        raise ValueError("Alexander polynomial of a torus knot needs |p|, |q| >= 2")
    num = _poly_mul(_x_pow_minus_one(a * b), _x_pow_minus_one(1))
    den = _poly_mul(_x_pow_minus_one(a), _x_pow_minus_one(b))
    quo, rem = _poly_divmod(num, den)
    if any(rem):
        raise ArithmeticError("exact division left a remainder")
    return quo


def classify_torus_knot(p: int, q: int) -> KnotType:
    """Normalized knot type of a (p, q)-winding torus curve.

    (p, q) ~ (-p, -q) are identified; the representative has q > 0, so the
    sign of p records chirality.  Imprimitive pairs are refused (torus
    links are reported through NotCoprime, never misclassified).
    """
    p, q = int(p), int(q)
    if p == 0 and q == 0:
        raise ValueError("winding pair must be nonzero")
    g = math.gcd(abs(p), abs(q))
    if g > 1:
        raise NotCoprime(g, (p // g, q // g))
    # orientation reversal (p, q) -> (-p, -q) is the same knot: normalise
    # to q > 0 (or p > 0 on the q = 0 axis)
    if q < 0 or (q == 0 and p < 0):
        p, q = -p, -q
    if min(abs(p), abs(q)) <= 1:
        return KnotType(p=p, q=q, label="unknot", chiral_pair=False, alexander=(1,))
    alex = tuple(alexander_polynomial(p, q))
    return KnotType(p=p, q=q, label=f"T({q},{p})", chiral_pair=True, alexander=alex)


def mirror(k: KnotType) -> KnotType:
    """Mirror image: theta-winding negated; Alexander unchanged."""
    if k.is_unknot:
        return k
    return classify_torus_knot(-k.p, k.q)


def classify_curve(curve: Curve, period: float | None = None) -> KnotType:
    """Winding extraction plus classification in one step."""
    p, q = winding_numbers(curve, period)
    return classify_torus_knot(p, q)
