"""Self-potential, quantum potential, and the Duffing approximation.

Energies are in rest-energy units (m c^2 with m = hbar*alpha/(4dc), the
electromagnetic mass), lengths in d, so everything here is a pure
number.  The central closed form is

    U = gamma / sqrt(1 + y),        y = gamma^6 beta_dot^2,

obtained by routing the retarded potential through the geometry
module's denominator identity (r - l beta) gamma = sqrt(1 + y).  The
decomposition U = gamma + Q then defines the quantum potential

    Q = -gamma (1 - 1/sqrt(1 + y)) <= 0,

which vanishes for uniform motion.  The alternating series in y with
the q_n coefficients is the binomial expansion of 1/sqrt(1 + y); it is
kept as a cross-check, never as the primary route, because it only
converges for y < 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .geometry import potential_denominator, y_parameter
from .model import KinematicState, PhysicalConstants, lorentz_gamma


def q_coeff(n: int) -> Fraction:
    """Exact coefficient (2n - 1)!! / (2^n n!) of the y-series.

    Also the mean of cos^(2n) over a period, which is the quadrature
    cross-check used in the tests.
    """
    if n < 1:
        raise ValueError(f"q_coeff needs n >= 1, got {n}")
    double_fact = math.prod(range(1, 2 * n, 2))
    return Fraction(double_fact, 2 ** n * math.factorial(n))


@dataclass(frozen=True)
class PotentialSample:
    """Energy decomposition at one kinematic state (rest-energy units)."""

    U: float
    Q: float
    gamma: float
    y: float

    def __post_init__(self):
        if not self.U > 0:
            raise ValueError(f"U must be positive, got {self.U!r}")
        if self.Q > 1e-12:
            raise ValueError(f"Q must be <= 0, got {self.Q!r}")
        if self.y < 0:
            raise ValueError(f"y must be >= 0, got {self.y!r}")


def self_potential_closed(state: KinematicState) -> float:
    """U in rest-energy units: d over the retarded denominator r - l*beta."""
    return 1.0 / potential_denominator(state)


def quantum_potential(state: KinematicState) -> float:
    """Q = -gamma (1 - 1/sqrt(1 + y)); zero for uniform motion."""
    g = lorentz_gamma(state.beta)
    y = y_parameter(state)
    return -g * (1.0 - 1.0 / math.sqrt(1.0 + y))


def sample(state: KinematicState) -> PotentialSample:
    g = lorentz_gamma(state.beta)
    return PotentialSample(U=self_potential_closed(state),
                           Q=quantum_potential(state),
                           gamma=g, y=y_parameter(state))


def self_potential_partial_sums(state: KinematicState,
                                n_terms: int) -> list[float]:
    """Cumulative partial sums gamma(1 + sum q_n (-y)^n), n = 1..N.

    Emits a divergence warning for y >= 1, where the alternating series
    no longer converges (the closed form remains valid there).
    """
    if n_terms < 1:
        raise ValueError(f"n_terms must be >= 1, got {n_terms}")
    g = lorentz_gamma(state.beta)
    y = y_parameter(state)
    if y >= 1.0:
        warnings.warn(f"series in y diverges for y = {y:.6g} >= 1",
                      RuntimeWarning, stacklevel=2)
    sums = []
    acc = 1.0
    for n in range(1, n_terms + 1):
        acc += float(q_coeff(n)) * (-y) ** n
        sums.append(g * acc)
    return sums


def self_potential_series(state: KinematicState, n_terms: int) -> float:
    return self_potential_partial_sums(state, n_terms)[-1]


def series_prefactor_ratio() -> Fraction:
    """Exact ratio of the series prefactor to the rest energy.

    The y-series carries the prefactor hbar^2 alpha^2 / (64 m r_eff^2).
    With m = hbar alpha / (4 d c) and r_eff = d / 2 every symbol
    cancels against m c^2; this evaluates the ratio symbolically
    (exponent bookkeeping over hbar, alpha, c, d with exact rational
    coefficients) and returns it, raising if any symbol survives.
    """
    # quantity = (coefficient, exponents of (hbar, alpha, c, d))
    def mul(a, b, power=1):
        coef = a[0] * b[0] ** power
        exps = tuple(x + power * y for x, y in zip(a[1], b[1]))
        return (coef, exps)

    one = (Fraction(1), (0, 0, 0, 0))
    hbar = (Fraction(1), (1, 0, 0, 0))
    alpha = (Fraction(1), (0, 1, 0, 0))
    c = (Fraction(1), (0, 0, 1, 0))
    d = (Fraction(1), (0, 0, 0, 1))
    m = mul(mul(mul((Fraction(1, 4), (0, 0, 0, 0)), hbar), alpha),
            mul(c, d), power=-1)
    r_eff = mul((Fraction(1, 2), (0, 0, 0, 0)), d)
    num = mul(mul(one, hbar, 2), alpha, 2)
    den = mul(mul((Fraction(64), (0, 0, 0, 0)), m), r_eff, 2)
    prefactor = mul(num, den, power=-1)
    rest_energy = mul(m, c, 2)
    ratio = mul(prefactor, rest_energy, power=-1)
    if any(e != 0 for e in ratio[1]):
        raise ArithmeticError(f"symbols did not cancel: {ratio[1]}")
    return ratio[0]


# ---------------------------------------------------------------------
# Conservative Duffing approximation
# ---------------------------------------------------------------------
# Keeping the first two series terms of Q along a harmonic ansatz gives
# the double-well energy Q_c(x) = -(x^2/2 - 3x^4/8) in rest-energy
# units and x in units of d (the half-quantum hbar*omega/2 with
# omega = alpha c / 2d equals m c^2 exactly, absorbing the prefactor).

def duffing_potential(x):
    """Q_c(x) = -x^2/2 + 3x^4/8 (rest-energy units, x in d)."""
    x = np.asarray(x, dtype=float)
    out = -0.5 * x * x + 0.375 * x ** 4
    return float(out) if out.ndim == 0 else out


def duffing_force(x):
    """-dQ_c/dx = x - (3/2) x^3."""
    x = np.asarray(x, dtype=float)
    out = x - 1.5 * x ** 3
    return float(out) if out.ndim == 0 else out


def duffing_stationary_points() -> tuple[float, float, float]:
    """Roots of dQ_c/dx: the origin and +-sqrt(2/3) (units d)."""
    w = math.sqrt(2.0 / 3.0)
    return (-w, 0.0, w)


def energy_scale_joules(constants: PhysicalConstants) -> float:
    """One rest-energy unit in joules (m_e c^2 for the given constants)."""
    return constants.m_electron * constants.c ** 2
