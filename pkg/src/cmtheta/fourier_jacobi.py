"""Fourier-Jacobi models of cusp forms and their boundary coefficients.

A form is modeled directly by its finite expansion

    X-side:  f(x, y)  = sum_{r >= 1} g_r(y)  exp(-2 pi i r x / beta0)
    Y-side:  f'(v, w) = sum_{r >= 1} g'_r(v) exp(-2 pi i r w / beta0)

with g_r a level-r section on E and g'_r one on E'.  Coefficients are
recovered by a trapezoidal contour integral over one beta0-period of the
cusp variable; the boundary class of index r is the (0,1)-pullback of the
extracted coefficient's relative-form kernel, and the verification report
checks it against the direct transform image of the stored term.  The raw
expansion coefficient of the global class is minus that image (the pipeline
works with the negated transform throughout, which removes the sign).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Dict

import numpy as np

from .errors import BundleMismatch, NonPeriodicInput, UnsupportedIndex
from .lattice import CurveTag, Lattice, random_points_centered
from .pairing import DEFAULT_QUAD_N
from .theta import LineBundleData, Section, section_from_coeffs
from .transforms import (
    CohomologyClass,
    class_deviation,
    class_equal,
    penrose_dolbeault,
    penrose_relative,
)

EXTRACT_SAMPLES = 256


class FJSide(enum.Enum):
    X = "X"
    Y = "Y"

    @property
    def curve(self) -> CurveTag:
        """Curve carrying the coefficient sections."""
        return CurveTag.E if self is FJSide.X else CurveTag.EPRIME


@dataclass(eq=False)
class FJSeries:
    """Finite Fourier-Jacobi data: level-r sections indexed by r >= 1."""

    side: FJSide
    lattice: Lattice
    terms: Dict[int, Section]

    def __post_init__(self):
        for r, sec in self.terms.items():
            if not isinstance(r, int) or r < 1:
                raise ValueError(f"cusp condition requires integer r >= 1, got {r!r}")
            if sec.bundle.r != r:
                raise BundleMismatch(f"term {r} has bundle level {sec.bundle.r}")
            if sec.bundle.tag is not self.side.curve:
                raise BundleMismatch(f"term {r} lives on {sec.bundle.tag}, need {self.side.curve}")
            if sec.bundle.lattice != self.lattice:
                raise BundleMismatch("term lattice differs from series lattice")

    @property
    def beta0(self) -> complex:
        return self.lattice.beta0

    @property
    def r_max(self) -> int:
        return max(self.terms, default=0)

    def evaluate(self, first, second):
        """Finite sum at (x, y) for the X-side, (v, w) for the Y-side."""
        first = np.asarray(first, dtype=complex)
        second = np.asarray(second, dtype=complex)
        if self.side is FJSide.Y:
            angle, cusp = first, second
        else:
            angle, cusp = second, first
        total = np.zeros(np.broadcast_shapes(first.shape, second.shape), dtype=complex)
        b = self.lattice.b
        for r, sec in self.terms.items():
            total = total + sec(angle) * np.exp(-(2.0 * np.pi * r / b) * cusp)
        if total.ndim == 0:
            return complex(total)
        return total

    def __call__(self, first, second):
        return self.evaluate(first, second)

    def to_json(self) -> dict:
        return {
            "side": self.side.value,
            "beta0": [self.beta0.real, self.beta0.imag],
            "terms": [
                {"r": r, "section": sec.to_json()} for r, sec in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FJSeries":
        terms = {entry["r"]: Section.from_json(entry["section"]) for entry in data["terms"]}
        if not terms:
            raise ValueError("series JSON has no terms")
        lattice = next(iter(terms.values())).bundle.lattice
        return cls(FJSide(data["side"]), lattice, terms)


def random_series(lattice: Lattice, side: FJSide, r_max: int, rng,
                  max_terms_per_level: int = 3) -> FJSeries:
    """Random series with at most max_terms_per_level basis terms per level."""
    terms = {}
    for r in range(1, r_max + 1):
        bundle = LineBundleData(lattice, r, side.curve)
        coeffs = np.zeros(bundle.mu, dtype=complex)
        k = rng.integers(1, max_terms_per_level + 1)
        idx = rng.choice(bundle.mu, size=min(k, bundle.mu), replace=False)
        coeffs[idx] = rng.standard_normal(len(idx)) + 1j * rng.standard_normal(len(idx))
        terms[r] = section_from_coeffs(bundle, coeffs)
    return FJSeries(side, lattice, terms)


def heisenberg_shift(side: FJSide, alpha: complex, beta: complex, first, second):
    """Argument transform under the Heisenberg element (alpha, beta).

    X-side: (x, y) -> (x + alpha*y + beta, y + conj(alpha));
    Y-side: (v, w) -> (v - alpha, w - conj(alpha)*v + conj(beta)).
    A modeled form is invariant under these shifts.
    """
    if side is FJSide.X:
        return first + alpha * second + beta, second + np.conj(alpha)
    return first - alpha, second - np.conj(alpha) * first + np.conj(beta)


# ---------------------------------------------------------------------------
# coefficient extraction


def extract_coefficient(func: Callable, r: int, anglepoint, lattice: Lattice,
                        side: FJSide = FJSide.Y, samples: int = EXTRACT_SAMPLES,
                        base_re: float | None = None, check: bool = True,
                        check_tol: float = 1e-8):
    """r-th expansion coefficient of a black-box form at the given angle point.

    Trapezoidal contour integral over one beta0-period of the cusp variable
    at fixed real part base_re (default b/4: large enough that every term is
    finite, small enough that no term overwhelms double precision).  Exact
    for finite expansions once samples exceed twice the top index.
    """
    b = lattice.b
    w0 = b / 4.0 if base_re is None else base_re
    t = np.arange(samples) / samples
    w = w0 + t * lattice.beta0
    angle = np.asarray(anglepoint, dtype=complex)
    flat = angle.reshape(-1)

    def call(cusp, ang):
        if side is FJSide.Y:
            return func(ang, cusp)
        return func(cusp, ang)

    if check:
        probe = flat[:1] if flat.size else np.array([0.0 + 0j])
        v0 = np.asarray(call(w0, probe), dtype=complex)
        v1 = np.asarray(call(w0 + lattice.beta0, probe), dtype=complex)
        defect = float(np.max(np.abs(v1 - v0) / (1.0 + np.abs(v0))))
        if defect > check_tol:
            raise NonPeriodicInput(
                f"cusp-variable periodicity defect {defect:.3e} exceeds {check_tol:.1e}"
            )

    try:
        vals = np.asarray(call(w[:, None], flat[None, :]), dtype=complex)
        if vals.shape != (samples, flat.size):
            raise TypeError
    except (TypeError, ValueError):
        vals = np.stack(
            [np.asarray(call(wk, flat), dtype=complex).reshape(flat.shape) for wk in w]
        )

    # exp(+2 pi i r w_k / beta0) = exp(2 pi r w0 / b) * exp(2 pi i r k / M)
    phases = np.exp(2.0 * np.pi * r * w0 / b) * np.exp(2j * np.pi * r * t)
    out = (phases @ vals) / samples
    if angle.ndim == 0:
        return complex(out[0])
    return out.reshape(angle.shape)


def _extracted_section(series: FJSeries, r: int, samples: int) -> Section:
    """Coefficient r recovered from the evaluated series, wrapped as a section."""
    bundle = series.terms[r].bundle

    def evaluate(flat):
        return extract_coefficient(
            series.evaluate, r, flat, series.lattice, series.side,
            samples=samples, check=False,
        )

    return Section(bundle, None, evaluate, None)


# ---------------------------------------------------------------------------
# boundary classes


def boundary_class(series: FJSeries, r: int, n: int = DEFAULT_QUAD_N,
                   samples: int = EXTRACT_SAMPLES) -> CohomologyClass:
    """Class of the r-th boundary cocycle on the conjugate curve.

    The coefficient is extracted numerically from the evaluated series (not
    read from the stored term), its relative-form kernel is pulled back along
    the smooth section of the conjugate curve, and the (0,1)-part represents
    the class.  For a Y-side series this lands on E at level -r; X-side on E'.
    """
    if r not in series.terms:
        raise UnsupportedIndex(f"series has no term of index {r}")
    ghat = _extracted_section(series, r, samples)
    target = series.side.curve.other()
    form = penrose_relative(ghat).pullback(target)
    # extraction is exact on the fundamental domain but loses relative
    # precision far outside it on multi-level series; the pairing guard is
    # replaced by the roundtrip and multiplier checks at tame points
    return CohomologyClass(form, verify_well_formed=False)


def opposite_component_pairings(series: FJSeries, r: int,
                                n: int = DEFAULT_QUAD_N) -> np.ndarray:
    """Pairing vector of the same kernel pulled back over the series' own curve.

    The pullback has no (0,1)-part there (the fiber coordinate is holomorphic
    along that section), so the vector vanishes: the model's form of the
    opposite-boundary vanishing statement.
    """
    if r not in series.terms:
        raise UnsupportedIndex(f"series has no term of index {r}")
    form = penrose_relative(series.terms[r]).pullback(series.side.curve)
    return CohomologyClass(form).pairing_vector(n)


def coefficient_identity_report(series: FJSeries, r_max: int, tol: float,
                                n: int = DEFAULT_QUAD_N,
                                samples: int = EXTRACT_SAMPLES,
                                rng=None) -> dict:
    """Check boundary classes against direct transform images for r <= r_max.

    Also checks the two vanishing statements: extraction at r <= 0 returns
    zero, and the opposite-type component carries the zero class.
    """
    rng = np.random.default_rng(11) if rng is None else rng
    lat = series.lattice
    probe_angles = random_points_centered(lat, rng, 8)

    entries = []
    all_pass = True
    for r in range(1, r_max + 1):
        if r in series.terms:
            cls_boundary = boundary_class(series, r, n=n, samples=samples)
            cls_image = CohomologyClass(penrose_dolbeault(series.terms[r]))
            deviation = class_deviation(cls_boundary, cls_image, n=n)
            passed = class_equal(cls_boundary, cls_image, tol, n=n)
        else:
            extracted = extract_coefficient(
                series.evaluate, r, probe_angles, lat, series.side,
                samples=samples, check=False,
            )
            deviation = float(np.max(np.abs(extracted)))
            passed = deviation <= tol
        entries.append({"r": r, "pass": bool(passed), "max_pairing_deviation": deviation})
        all_pass = all_pass and passed

    vanish_dev = 0.0
    for r in (0, -1, -2):
        extracted = extract_coefficient(
            series.evaluate, r, probe_angles, lat, series.side,
            samples=samples, check=False,
        )
        vanish_dev = max(vanish_dev, float(np.max(np.abs(extracted))))
    vanishing_ok = vanish_dev <= 1e-10

    opposite_dev = 0.0
    for r in series.terms:
        if r <= r_max:
            vec = opposite_component_pairings(series, r, n=n)
            opposite_dev = max(opposite_dev, float(np.max(np.abs(vec))) if vec.size else 0.0)
    opposite_ok = opposite_dev <= 1e-9

    return {
        "side": series.side.value,
        "convention": "boundary_class(series, r) matches the transform image of "
                      "term r; the raw expansion coefficient is its negative",
        "entries": entries,
        "vanishing_r_nonpositive": {"max_abs": vanish_dev, "pass": bool(vanishing_ok)},
        "opposite_component": {"max_abs_pairing": opposite_dev, "pass": bool(opposite_ok)},
        "pass": bool(all_pass and vanishing_ok and opposite_ok),
    }
