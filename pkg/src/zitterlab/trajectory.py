"""Trajectory containers and seed histories for the delay dynamics.

A Trajectory is an immutable record of time-ordered knots (t, x, beta,
beta_dot) plus dense evaluators.  Position uses cubic Hermite data
(x, beta) so the interpolant's derivative at every knot equals the
stored velocity by construction; velocity uses (beta, beta_dot) the
same way, and acceleration is the derivative of the velocity channel.

A SeedHistory prescribes the past of the particle on [-span, 0], which
the delay equation needs before it can march forward.  Histories are
analytic: they can be sampled at any time without interpolation error.

Units throughout: lengths in d, times in d/c, so velocity is beta and
acceleration is beta_dot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicHermiteSpline


class TrajectoryDomainError(ValueError):
    """Evaluation outside the trajectory's covered time span."""


class SuperluminalError(ValueError):
    """|beta| reached 1 where the model requires subluminal motion."""


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered kinematic samples with Hermite dense output."""

    t: np.ndarray
    x: np.ndarray
    beta: np.ndarray
    beta_dot: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("t", "x", "beta", "beta_dot"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            if arr.ndim != 1 or arr.size != self.t.size:
                raise ValueError(f"knot array {name} has wrong shape")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite values in knot array {name}")
        if self.t.size < 2:
            raise ValueError("a trajectory needs at least two knots")
        if not np.all(np.diff(self.t) > 0):
            raise ValueError("knot times must be strictly increasing")
        if np.any(np.abs(self.beta) >= 1.0):
            raise SuperluminalError("|beta| >= 1 at a trajectory knot")
        for arr in (self.t, self.x, self.beta, self.beta_dot):
            arr.setflags(write=False)
        object.__setattr__(self, "_x_spline",
                           CubicHermiteSpline(self.t, self.x, self.beta))
        object.__setattr__(self, "_b_spline",
                           CubicHermiteSpline(self.t, self.beta, self.beta_dot))
        object.__setattr__(self, "_a_spline", self._b_spline.derivative())

    @property
    def t0(self) -> float:
        return float(self.t[0])

    @property
    def t1(self) -> float:
        return float(self.t[-1])

    def _check_domain(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.t0 - 1e-12) or np.any(t > self.t1 + 1e-12):
            raise TrajectoryDomainError(
                f"time outside covered span [{self.t0}, {self.t1}]")
        return np.clip(t, self.t0, self.t1)

    def position(self, t):
        return self._x_spline(self._check_domain(t))

    def velocity(self, t):
        return self._b_spline(self._check_domain(t))

    def acceleration(self, t):
        return self._a_spline(self._check_domain(t))

    def window(self, t_lo: float, t_hi: float) -> "Trajectory":
        """Knot subrange with t_lo <= t <= t_hi (metadata shared)."""
        sel = (self.t >= t_lo - 1e-12) & (self.t <= t_hi + 1e-12)
        if np.count_nonzero(sel) < 2:
            raise ValueError("window contains fewer than two knots")
        return Trajectory(self.t[sel].copy(), self.x[sel].copy(),
                          self.beta[sel].copy(), self.beta_dot[sel].copy(),
                          dict(self.metadata))


# ---------------------------------------------------------------------
# Seed histories
# ---------------------------------------------------------------------

# The kick is the second derivative of a C-infinity compactly supported
# bump: acceleration integrates to zero velocity AND zero displacement,
# so the history ends in exact quiet rest (or exact uniform drift) and
# the continuation across t = 0 stays smooth at every order.  Support
# sits strictly inside the final d/c of history, with margins, so the
# state at t = 0 is identically the unperturbed one.
_BUMP_CENTER = -0.5
_BUMP_HALFWIDTH = 0.4


def _bump_raw(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    ui = u[inside]
    out[inside] = np.exp(-1.0 / ((1.0 - ui) * (1.0 + ui)))
    return out


def _bump_d1(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    ui = u[inside]
    w = (1.0 - ui) * (1.0 + ui)
    out[inside] = np.exp(-1.0 / w) * (-2.0 * ui / (w * w))
    return out


def _bump_d2(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    ui = u[inside]
    w = (1.0 - ui) * (1.0 + ui)
    out[inside] = np.exp(-1.0 / w) * (
        4.0 * ui * ui / w ** 4 - 2.0 * (1.0 + 3.0 * ui * ui) / w ** 3)
    return out


def _bump_accel_peak() -> float:
    """max |bump''| over the support, on a fixed fine grid (the
    normalization convention for kick amplitudes; deterministic)."""
    u = np.linspace(-1.0, 1.0, 8193)
    return float(np.max(np.abs(_bump_d2(u))))


_BUMP_D2_PEAK = _bump_accel_peak()


@dataclass(frozen=True)
class SeedHistory:
    """Prescribed past motion on [-span, 0].

    kind is one of rest_kick, uniform_motion, uniform_kick, mode_kick,
    custom.  amplitude is the peak |beta_dot| of the kick (0 for none);
    beta is the underlying drift.  Analytic channels x, beta, beta_dot
    are exposed as vectorized callables of time.

    The bump kinds perturb with a compactly supported C-infinity pulse.
    mode_kick instead perturbs along the dominant eigenfunction of the
    motion equation linearized about the drift, A e^{rate t}: the one
    seed shape that excites the slow unstable branch alone.  A generic
    smooth pulse also loads the tower of faster oscillatory branches,
    which outrun the dominant one long before it could be measured.
    """

    kind: str
    amplitude: float
    span: float
    beta: float = 0.0
    rate: float = 0.0
    table: Trajectory | None = None

    def __post_init__(self):
        if not abs(self.beta) < 1.0:
            raise SuperluminalError(f"seed drift beta = {self.beta!r}")
        gamma = 1.0 / math.sqrt((1.0 - self.beta) * (1.0 + self.beta))
        if self.span < 2.0 * gamma:
            raise ValueError(
                f"span {self.span} shorter than twice the delay {gamma}")

    @classmethod
    def rest_kick(cls, amplitude: float, span: float = 3.0) -> "SeedHistory":
        return cls(kind="rest_kick", amplitude=float(amplitude), span=span)

    @classmethod
    def uniform_motion(cls, beta: float, span: float | None = None) -> "SeedHistory":
        gamma = 1.0 / math.sqrt((1.0 - beta) * (1.0 + beta))
        if span is None:
            span = max(3.0, 2.5 * gamma)
        return cls(kind="uniform_motion", amplitude=0.0, span=span, beta=beta)

    @classmethod
    def uniform_kick(cls, beta: float, amplitude: float,
                     span: float | None = None) -> "SeedHistory":
        gamma = 1.0 / math.sqrt((1.0 - beta) * (1.0 + beta))
        if span is None:
            span = max(3.0, 2.5 * gamma)
        return cls(kind="uniform_kick", amplitude=float(amplitude),
                   span=span, beta=beta)

    @classmethod
    def mode_kick(cls, beta: float, amplitude: float,
                  span: float | None = None) -> "SeedHistory":
        """Kick along the dominant unstable mode of the drift state.

        The offset channels are A e^{rate t} with rate the positive
        real characteristic root in lab time and A = amplitude / rate^2,
        so amplitude is again the peak |beta_dot| of the perturbation
        (reached at t = 0).  The history is an exact solution of the
        linearized motion equation; nothing else is excited above
        O(amplitude^2).
        """
        from .roots import dominant_real_root
        gamma = 1.0 / math.sqrt((1.0 - beta) * (1.0 + beta))
        if span is None:
            span = max(3.0, 2.5 * gamma)
        rate = dominant_real_root(beta) / gamma
        return cls(kind="mode_kick", amplitude=float(amplitude),
                   span=span, beta=beta, rate=rate)

    @classmethod
    def custom(cls, table: Trajectory) -> "SeedHistory":
        if table.t1 > 1e-12:
            raise ValueError("custom seed history must end at t <= 0")
        return cls(kind="custom", amplitude=0.0,
                   span=table.t1 - table.t0, beta=0.0, table=table)

    def _scale(self) -> float:
        return self.amplitude * _BUMP_HALFWIDTH ** 2 / _BUMP_D2_PEAK

    def _mode_amp(self) -> float:
        return self.amplitude / self.rate ** 2

    def position(self, t):
        t = np.asarray(t, dtype=float)
        if self.table is not None:
            return self.table.position(t)
        return self.beta * t + self.offset_position(t)

    def velocity(self, t):
        t = np.asarray(t, dtype=float)
        if self.table is not None:
            return self.table.velocity(t)
        return self.beta + self.offset_velocity(t)

    def acceleration(self, t):
        t = np.asarray(t, dtype=float)
        if self.table is not None:
            return self.table.acceleration(t)
        if self.kind == "mode_kick":
            return self._mode_amp() * self.rate ** 2 * np.exp(self.rate * t)
        u = (t - _BUMP_CENTER) / _BUMP_HALFWIDTH
        return self._scale() * _bump_d2(u) / _BUMP_HALFWIDTH ** 2

    @property
    def drift(self) -> float:
        """Background drift velocity the kick rides on."""
        return 0.0 if self.table is not None else self.beta

    def offset_position(self, t):
        """x(t) - drift*t, computed without the drift term.

        The integrator marches in drift-comoving coordinates: absolute
        positions grow linearly and their floating-point granularity
        would swamp a 1e-6 kick, while the offset stays near the kick
        scale for near-uniform motion.
        """
        t = np.asarray(t, dtype=float)
        if self.table is not None:
            return self.table.position(t)
        if self.kind == "mode_kick":
            return self._mode_amp() * np.exp(self.rate * t)
        u = (t - _BUMP_CENTER) / _BUMP_HALFWIDTH
        return self._scale() * _bump_raw(u)

    def offset_velocity(self, t):
        t = np.asarray(t, dtype=float)
        if self.table is not None:
            return self.table.velocity(t)
        if self.kind == "mode_kick":
            return self._mode_amp() * self.rate * np.exp(self.rate * t)
        u = (t - _BUMP_CENTER) / _BUMP_HALFWIDTH
        return self._scale() * _bump_d1(u) / _BUMP_HALFWIDTH

    def describe(self) -> str:
        if self.kind == "custom":
            return f"custom[{self.table.t0:.6g},{self.table.t1:.6g}]"
        if self.kind == "mode_kick":
            return (f"mode_kick(amp={self.amplitude:.6g},"
                    f"beta={self.beta:.6g},rate={self.rate:.6g})")
        return f"{self.kind}(amp={self.amplitude:.6g},beta={self.beta:.6g})"
