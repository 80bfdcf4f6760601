"""Exact spin correlations of the two-qubit singlet state.

Measurement settings live either on the unit sphere (:class:`UnitVector3`)
or, for planar configurations, on the circle (:class:`PlanarAngle`).  The
planar convention used throughout the package is

    alice_direction(alpha) = ( cos(alpha), 0,  sin(alpha))
    bob_direction(beta)    = (-cos(beta),  0, -sin(beta))

so that ``singlet_correlation(alice_direction(a), bob_direction(b))`` equals
``cos(a - b)``.  When both wings use ``alice_direction`` the correlation is
``-cos(a - b)`` instead, i.e. perfect anticorrelation at equal angles; the
QKD simulation relies on that form.

All functions here are pure; every stochastic operation takes an explicit
``numpy.random.Generator`` (see :mod:`bellspace.rng`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

#: Classical (local hidden-variable) CHSH bound.
CHSH_CLASSICAL_BOUND = 2.0
#: Quantum (Tsirelson) CHSH bound, attained by the singlet state.
CHSH_QUANTUM_BOUND = 2.0 * math.sqrt(2.0)

_UNIT_NORM_TOL = 1e-12
_CORRELATION_SLACK = 1e-9


@dataclass(frozen=True)
class PlanarAngle:
    """An angle in radians, wrapped into [0, 2*pi) on construction."""

    theta: float

    def __post_init__(self) -> None:
        theta = float(self.theta)
        if not math.isfinite(theta):
            raise ValueError(f"angle must be finite, got {theta!r}")
        object.__setattr__(self, "theta", theta % TWO_PI)


def as_angle(value: PlanarAngle | float) -> float:
    """Coerce a PlanarAngle or plain radians value to a wrapped float."""
    if isinstance(value, PlanarAngle):
        return value.theta
    return PlanarAngle(float(value)).theta


@dataclass(frozen=True)
class UnitVector3:
    """A measurement direction on the unit sphere (norm 1 within 1e-12)."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        norm_sq = self.x * self.x + self.y * self.y + self.z * self.z
        if abs(norm_sq - 1.0) > _UNIT_NORM_TOL:
            raise ValueError(
                f"direction ({self.x}, {self.y}, {self.z}) is not unit length: "
                f"|v|^2 = {norm_sq!r}"
            )

    @classmethod
    def normalized(cls, x: float, y: float, z: float) -> "UnitVector3":
        norm = math.sqrt(x * x + y * y + z * z)
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(x / norm, y / norm, z / norm)

    def dot(self, other: "UnitVector3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class OutcomePair:
    """A pair of +-1 measurement outcomes (Alice's s_a, Bob's s_b)."""

    s_a: int
    s_b: int

    def __post_init__(self) -> None:
        if self.s_a not in (1, -1) or self.s_b not in (1, -1):
            raise ValueError(f"outcomes must be +-1, got ({self.s_a}, {self.s_b})")

    @property
    def product(self) -> int:
        return self.s_a * self.s_b


@dataclass(frozen=True)
class ChshSettings:
    """Two settings per wing for a CHSH test; accepts angles or PlanarAngle."""

    alpha1: PlanarAngle
    alpha2: PlanarAngle
    beta1: PlanarAngle
    beta2: PlanarAngle

    def __post_init__(self) -> None:
        for name in ("alpha1", "alpha2", "beta1", "beta2"):
            value = getattr(self, name)
            if not isinstance(value, PlanarAngle):
                object.__setattr__(self, name, PlanarAngle(float(value)))


def canonical_chsh_settings() -> ChshSettings:
    """The standard maximal-violation quadruple: alphas (pi/2, 0), betas (pi/4, -pi/4)."""
    return ChshSettings(
        alpha1=PlanarAngle(math.pi / 2),
        alpha2=PlanarAngle(0.0),
        beta1=PlanarAngle(math.pi / 4),
        beta2=PlanarAngle(-math.pi / 4),
    )


def unit_from_planar_angle(theta: PlanarAngle | float) -> UnitVector3:
    """Planar direction (cos theta, 0, sin theta) in the x-z plane."""
    t = as_angle(theta)
    return UnitVector3(math.cos(t), 0.0, math.sin(t))


#: Alice's planar direction constructor (alias; see module docstring).
alice_direction = unit_from_planar_angle


def bob_direction(theta: PlanarAngle | float) -> UnitVector3:
    """Bob's sign-flipped planar direction (-cos theta, 0, -sin theta).

    With this convention the singlet correlation of the pair
    (alice_direction(a), bob_direction(b)) is cos(a - b).
    """
    t = as_angle(theta)
    return UnitVector3(-math.cos(t), 0.0, -math.sin(t))


def singlet_correlation(a: UnitVector3, b: UnitVector3) -> float:
    """Expectation of the outcome product for the singlet state: -(a . b)."""
    return -a.dot(b)


def joint_outcome_probability(a: UnitVector3, b: UnitVector3, s: OutcomePair) -> float:
    """Probability of the outcome pair s at settings (a, b) on the singlet.

    Returns (1 - s_a * s_b * (a . b)) / 4, the unique joint distribution with
    unbiased +-1 marginals whose outcome-product expectation is -(a . b).
    """
    return (1.0 - s.product * a.dot(b)) / 4.0


def sample_singlet_outcomes(
    a: UnitVector3, b: UnitVector3, rng: np.random.Generator
) -> OutcomePair:
    """Draw one outcome pair from the singlet joint distribution.

    Deterministic for a fixed generator state: consumes exactly two uniforms,
    the first for Alice's fair marginal, the second for Bob's conditional.
    """
    dot = a.dot(b)
    s_a = 1 if rng.random() < 0.5 else -1
    # P(s_b = s_a | s_a) = (1 - a.b)/2
    s_b = s_a if rng.random() < (1.0 - dot) / 2.0 else -s_a
    return OutcomePair(s_a, s_b)


def chsh_statistic(p11: float, p12: float, p21: float, p22: float) -> float:
    """CHSH combination |p11 - p12| + |p21 + p22| of four correlations.

    Rejects inputs with |p| > 1 + 1e-9, which signal corrupted correlation
    values rather than a legitimate statistic.
    """
    for name, value in (("p11", p11), ("p12", p12), ("p21", p21), ("p22", p22)):
        if not math.isfinite(value) or abs(value) > 1.0 + _CORRELATION_SLACK:
            raise ValueError(f"correlation {name}={value!r} outside [-1, 1]")
    return abs(p11 - p12) + abs(p21 + p22)


def quantum_chsh(settings: ChshSettings, g: float) -> float:
    """CHSH statistic of the localized singlet correlations g*cos(alpha_i - beta_j).

    The localization factor g scales every correlation, so the result is g
    times the unscaled statistic; g=1 at the canonical settings gives 2*sqrt(2).
    """
    if not 0.0 <= g <= 1.0:
        raise ValueError(f"localization factor g={g!r} outside [0, 1]")
    alphas = (settings.alpha1.theta, settings.alpha2.theta)
    betas = (settings.beta1.theta, settings.beta2.theta)
    p = [[g * math.cos(alpha - beta) for beta in betas] for alpha in alphas]
    return chsh_statistic(p[0][0], p[0][1], p[1][0], p[1][1])
