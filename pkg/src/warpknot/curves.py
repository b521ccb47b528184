"""Sampled curves on the quotient, with unwrapped angle histories.

A Curve keeps uniform arclength samples of (r, theta, t) with theta and t
unwrapped (winding numbers are ratios of total angle increments, which mod
2*pi histories destroy), plus optional velocity samples.  Velocities make
the curve C^1: positions interpolate by cubic Hermite segments, which is
what closure detection refines on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import TooFewSamples


@dataclass
class Curve:
    s: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    t: np.ndarray
    vr: np.ndarray | None = None
    vtheta: np.ndarray | None = None
    vt: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=float)
        for name in ("r", "theta", "t", "vr", "vtheta", "vt"):
            v = getattr(self, name)
            if v is not None:
                setattr(self, name, np.asarray(v, dtype=float))

    def __len__(self) -> int:
        return len(self.s)

    @property
    def has_velocities(self) -> bool:
        return self.vr is not None and self.vtheta is not None and self.vt is not None

    @property
    def ds(self) -> float:
        return float(self.s[1] - self.s[0])

    def positions(self) -> np.ndarray:
        return np.column_stack([self.r, self.theta, self.t])

    def velocities(self) -> np.ndarray:
        if not self.has_velocities:
            raise TooFewSamples("curve carries no velocity samples")
        return np.column_stack([self.vr, self.vtheta, self.vt])

    def state(self, i: int) -> np.ndarray:
        """Six-component state (r, theta, t, vr, vtheta, vt) at sample i."""
        return np.concatenate([self.positions()[i], self.velocities()[i]])

    def hermite_state(self, s: float) -> np.ndarray:
        """C^1 state at arclength s by cubic Hermite on the bracketing samples."""
        if not self.has_velocities:
            raise TooFewSamples("Hermite evaluation needs velocity samples")
        ss = self.s
        i = int(np.clip(np.searchsorted(ss, s) - 1, 0, len(ss) - 2))
        hstep = ss[i + 1] - ss[i]
        tau = (s - ss[i]) / hstep
        p0 = self.positions()[i]
        p1 = self.positions()[i + 1]
        v0 = self.velocities()[i]
        v1 = self.velocities()[i + 1]
        h00 = (1 + 2 * tau) * (1 - tau) ** 2
        h10 = tau * (1 - tau) ** 2
        h01 = tau**2 * (3 - 2 * tau)
        h11 = tau**2 * (tau - 1)
        pos = h00 * p0 + h10 * hstep * v0 + h01 * p1 + h11 * hstep * v1
        d00 = 6 * tau * (tau - 1)
        d10 = (1 - tau) * (1 - 3 * tau)
        d01 = -d00
        d11 = tau * (3 * tau - 2)
        vel = (d00 * p0 / hstep + d10 * v0 + d01 * p1 / hstep + d11 * v1)
        return np.concatenate([pos, vel])

    def to_csv(self, path, embed=None) -> None:
        """Write (s, r, theta_unwrapped, t_unwrapped[, x, y, z]) rows."""
        cols = ["s", "r", "theta_unwrapped", "t_unwrapped"]
        data = [self.s, self.r, self.theta, self.t]
        if embed is not None:
            xyz = embed(self)
            cols += ["x", "y", "z"]
            data += [xyz[:, 0], xyz[:, 1], xyz[:, 2]]
        with open(path, "w") as fh:
            fh.write(",".join(cols) + "\n")
            for row in zip(*data):
                fh.write(",".join(repr(float(v)) for v in row) + "\n")

    def meta_json(self, **kwargs) -> str:
        kwargs.setdefault("indent", 2)
        kwargs.setdefault("sort_keys", True)
        safe = {}
        for k, v in self.meta.items():
            if isinstance(v, complex):
                safe[k] = {"re": v.real, "im": v.imag}
            elif isinstance(v, (np.integer, np.floating)):
                safe[k] = v.item()
            else:
                safe[k] = v
        return json.dumps(safe, **kwargs)
