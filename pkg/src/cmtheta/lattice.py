"""Rank-2 lattices in C with a distinguished imaginary period.

The lattice is required to be stable under complex conjugation as a set, so
that one period lattice serves both the curve E (elements embedded by
alpha -> conj(alpha)) and its complex conjugate E' (alpha -> alpha).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from .errors import ConfigError, NotInLattice
from .gaussian import GaussianRational


class CurveTag(enum.Enum):
    E = "E"
    EPRIME = "Eprime"

    def other(self) -> "CurveTag":
        return CurveTag.EPRIME if self is CurveTag.E else CurveTag.E


@dataclass(frozen=True)
class Lattice:
    """Lattice spanned by (omega1, omega2) with Im(omega1/omega2) > 0.

    beta0 is the distinguished purely imaginary period; b = beta0/i > 0.
    generators_exact, when present, holds the generators as Gaussian
    rationals and enables exact membership checks.
    """

    omega1: complex
    omega2: complex
    beta0: complex
    generators_exact: Optional[Tuple[GaussianRational, GaussianRational]] = None

    def __post_init__(self):
        if (self.omega1 / self.omega2).imag <= 0:
            raise ValueError("Im(omega1/omega2) must be positive")
        if abs(self.beta0.real) > 1e-15 or self.beta0.imag <= 0:
            raise ValueError("beta0 must be purely imaginary with Im > 0")
        if self.generators_exact is not None:
            g1, g2 = self.generators_exact
            if complex(g1) != self.omega1 or complex(g2) != self.omega2:
                raise ValueError("exact generators disagree with float generators")
            if not (self.contains_exact(g1.conjugate())
                    and self.contains_exact(g2.conjugate())):
                raise ValueError("lattice is not stable under complex conjugation")
        else:
            for g in (self.omega1, self.omega2):
                if not contains(g.conjugate(), self, 1e-12):
                    raise ValueError("lattice is not stable under complex conjugation")

    @property
    def b(self) -> float:
        return self.beta0.imag

    @property
    def area(self) -> float:
        """Lebesgue area of the fundamental parallelogram."""
        return abs((self.omega2.conjugate() * self.omega1).imag)

    def coords(self, point: complex) -> Tuple[float, float]:
        """Real coordinates (a, b) with point = a*omega1 + b*omega2."""
        d = (self.omega2.conjugate() * self.omega1).imag
        a = (self.omega2.conjugate() * point).imag / d
        b = (self.omega1.conjugate() * point).imag / -d
        return a, b

    def element(self, a: int, b: int) -> complex:
        return a * self.omega1 + b * self.omega2

    def int_coords(self, point: complex, tol: float = 1e-9) -> Tuple[int, int]:
        """Integer coordinates of a lattice element; NotInLattice otherwise."""
        a, b = self.coords(point)
        na, nb = round(a), round(b)
        if abs(a - na) > tol or abs(b - nb) > tol:
            raise NotInLattice(f"{point} is not in the lattice (coords {a}, {b})")
        return na, nb

    def contains_exact(self, point: GaussianRational) -> bool:
        """Exact membership for Gaussian-rational points (needs exact generators)."""
        if self.generators_exact is None:
            raise ValueError("lattice carries no exact generators")
        g1, g2 = self.generators_exact
        # solve point = a*g1 + b*g2 over the rationals
        det = g1.re * g2.im - g1.im * g2.re
        if det == 0:
            raise ValueError("degenerate exact generators")
        a = (point.re * g2.im - point.im * g2.re) / det
        b = (g1.re * point.im - g1.im * point.re) / det
        return a.denominator == 1 and b.denominator == 1

    @classmethod
    def default(cls) -> "Lattice":
        """The lattice (1+i)Z[i] with omega2 = 1+i, omega1 = i(1+i), beta0 = i.

        For every alpha here alpha*conj(alpha) is an even integer, so the
        Heisenberg relation beta + conj(beta) = alpha*conj(alpha) has integer
        solutions and the semicharacter of the level bundles is trivially 1.
        """
        return cls(
            omega1=complex(-1, 1),
            omega2=complex(1, 1),
            beta0=1j,
            generators_exact=(GaussianRational(-1, 1), GaussianRational(1, 1)),
        )

    @classmethod
    def square(cls) -> "Lattice":
        """The Gaussian integers Z[i] with omega2 = 1, omega1 = i, beta0 = i."""
        return cls(
            omega1=1j,
            omega2=complex(1, 0),
            beta0=1j,
            generators_exact=(GaussianRational(0, 1), GaussianRational(1)),
        )

    @classmethod
    def from_config(cls, path) -> "Lattice":
        """Load from a key-value file with fields omega1_re, omega1_im,
        omega2_re, omega2_im, beta0_im (decimal or fraction strings)."""
        fields = {}
        with open(path, "r", encoding="utf-8") as fh:
            for raw in fh:
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"malformed config line: {raw.strip()!r}")
                key, value = (part.strip() for part in line.split("=", 1))
                fields[key] = value
        return cls.from_mapping(fields)

    @classmethod
    def from_mapping(cls, fields) -> "Lattice":
        required = ("omega1_re", "omega1_im", "omega2_re", "omega2_im", "beta0_im")
        missing = [k for k in required if k not in fields]
        if missing:
            raise ConfigError(f"lattice config missing keys: {missing}")
        try:
            exact = {k: Fraction(str(fields[k])) for k in required}
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"unparseable lattice field: {exc}") from exc
        g1 = GaussianRational(exact["omega1_re"], exact["omega1_im"])
        g2 = GaussianRational(exact["omega2_re"], exact["omega2_im"])
        try:
            return cls(
                omega1=complex(g1),
                omega2=complex(g2),
                beta0=complex(0, float(exact["beta0_im"])),
                generators_exact=(g1, g2),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def reduce(point: complex, lat: Lattice) -> Tuple[complex, complex]:
    """Representative of point in the half-open fundamental parallelogram.

    Returns (rep, elem) with point = rep + elem, elem a lattice element and
    rep = a*omega1 + b*omega2 for a, b in [0, 1).
    """
    a, b = lat.coords(point)
    na, nb = math.floor(a), math.floor(b)
    elem = lat.element(na, nb)
    return point - elem, elem


def contains(point: complex, lat: Lattice, tol: float) -> bool:
    """True iff the distance from point to the lattice is at most tol."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    a, b = lat.coords(point)
    nearest = lat.element(round(a), round(b))
    return abs(point - nearest) <= tol


def embed(alpha: complex, tag: CurveTag) -> complex:
    """Translation realized by alpha on the given curve."""
    alpha = complex(alpha)
    return alpha.conjugate() if tag is CurveTag.E else alpha


def random_points(lat: Lattice, rng, size: int):
    """Uniform sample of the fundamental parallelogram."""
    a = rng.random(size)
    b = rng.random(size)
    return a * lat.omega1 + b * lat.omega2


def random_points_centered(lat: Lattice, rng, size: int, scale: float = 0.5):
    """Uniform sample of a centered sub-parallelogram (side fraction scale).

    Useful when several levels are evaluated together: section magnitudes
    stay comparable near the origin, keeping mixed-level roundoff small.
    """
    a = (rng.random(size) - 0.5) * scale
    b = (rng.random(size) - 0.5) * scale
    return a * lat.omega1 + b * lat.omega2


def random_elements(lat: Lattice, rng, size: int, span: int = 3):
    """Random lattice elements with coordinates in [-span, span]."""
    a = rng.integers(-span, span + 1, size)
    b = rng.integers(-span, span + 1, size)
    return a * lat.omega1 + b * lat.omega2
