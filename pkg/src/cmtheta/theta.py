"""Theta series with characteristics and the canonical section basis.

A level-r bundle on either curve is described by the Hermitian form
H(x, y) = 2*lambda*conj(x)*y with lambda = i*r/beta0 = r/b > 0, together
with a semicharacter chi taking root-of-unity values.  Sections are built
from the classical series

    theta(u, z; rho, s) = sum_n exp(i*pi*(n+rho)^2 z) exp(2*pi*i*(n+rho)(u+s))

through f_{rho,s}(u) = exp(pi*lambda*zeta^-2*u^2) theta(mu*u/omega2, mu*z; rho, s),
where z = omega1/omega2, zeta = omega2/|omega2| and mu = 2*lambda*Im(conj(omega2)*omega1)
is the degree.  For j = 0..mu-1 the characteristics rho + j/mu give a basis.
"""

from __future__ import annotations

import cmath
import dataclasses
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional, Tuple

import numpy as np

from . import kernels
from .errors import (
    BundleMismatch,
    IndexOutOfRange,
    NonconvergentModulus,
    NonIntegralDegree,
)
from .lattice import CurveTag, Lattice, embed

DEFAULT_TOL = 1e-12

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# series evaluation


def truncation_order(z: complex, im_u_max: float, rho: float, tol: float) -> int:
    """Smallest summation radius N whose Gaussian-tail majorant is below tol.

    Both tails of the series are bounded by geometric majorants of the term
    magnitude exp(-pi*Im(z)*m^2 + 2*pi*m*im_u_max) with m = N+1-frac(rho).
    """
    y = z.imag
    a = abs(im_u_max)
    rho_f = rho - math.floor(rho)
    n = max(2, math.ceil(a / y) + 1)
    while n < 200_000:
        m = n + 1 - rho_f
        log_q = -math.pi * y * (2 * m + 1) + TWO_PI * a
        if log_q < math.log(0.5):
            log_term = -math.pi * y * m * m + TWO_PI * a * m
            bound = 2.0 * math.exp(log_term) / (1.0 - math.exp(log_q))
            if bound < tol:
                return n
        n += 1 + n // 4
    raise NonconvergentModulus(f"no practical truncation for Im z = {y}, |Im u| <= {a}")


def _theta_flat(flat_u, z, rho, s, tol, derivative, shift=None):
    z = complex(z)
    if z.imag <= 0:
        raise NonconvergentModulus(f"Im(z) = {z.imag} must be positive")
    rho_f = float(rho)
    rho_f -= math.floor(rho_f)
    im_max = float(np.max(np.abs(flat_u.imag))) if flat_u.size else 0.0
    n = truncation_order(z, im_max, rho_f, tol)
    return kernels.theta_sum(flat_u, z, rho_f, float(s), n, derivative, shift)


def _vector_apply(fn, u):
    arr = np.asarray(u, dtype=np.complex128)
    vals = np.asarray(fn(np.ascontiguousarray(arr.reshape(-1))))
    if arr.ndim == 0:
        return complex(vals[0])
    return vals.reshape(arr.shape)


def theta_series(u, z, rho=0, s=0, tol: float = DEFAULT_TOL):
    """Evaluate theta(u, z; rho, s) with a certified truncation below tol.

    u may be a complex scalar or any-shape array; rho and s are real
    (rationals in all intended uses).
    """
    return _vector_apply(lambda flat: _theta_flat(flat, z, rho, s, tol, False), u)


def theta_series_du(u, z, rho=0, s=0, tol: float = DEFAULT_TOL):
    """d/du of theta_series (termwise factor 2*pi*i*(n+rho))."""
    return _vector_apply(lambda flat: _theta_flat(flat, z, rho, s, tol, True), u)


# ---------------------------------------------------------------------------
# bundles


@dataclass(frozen=True)
class ThetaCharacteristic:
    """Characteristic (rho, s); rho matters modulo 1/mu, s modulo 1."""

    rho: Fraction
    s: Fraction

    def normalized(self, mu: int) -> "ThetaCharacteristic":
        step = Fraction(1, mu)
        return ThetaCharacteristic(self.rho % step, self.s % 1)


def _integral_degree(lattice: Lattice, r: int) -> int:
    lam = r / lattice.b
    mu_float = 2.0 * lam * (lattice.omega2.conjugate() * lattice.omega1).imag
    mu = round(mu_float)
    if mu <= 0 or abs(mu_float - mu) > 1e-9:
        raise NonIntegralDegree(f"degree 2*lambda*Im(conj(w2)*w1) = {mu_float} is not a positive integer")
    return mu


@dataclass(frozen=True)
class LineBundleData:
    """Level-r bundle data on one curve: factor of automorphy and degree.

    The semicharacter is derived from the characteristic:
    chi(omega1) = exp(-2*pi*i*s), chi(omega2) = exp(2*pi*i*mu*rho),
    extended to the lattice by the Appell-Humbert sign rule.
    """

    lattice: Lattice
    r: int
    tag: CurveTag
    rho: Fraction = Fraction(0)
    s: Fraction = Fraction(0)

    def __post_init__(self):
        if not isinstance(self.r, int) or self.r < 1:
            raise ValueError(f"level r must be a positive integer, got {self.r!r}")
        object.__setattr__(self, "rho", Fraction(self.rho))
        object.__setattr__(self, "s", Fraction(self.s))
        _integral_degree(self.lattice, self.r)

    @property
    def lam(self) -> float:
        """i*r/beta0, a positive real."""
        return self.r / self.lattice.b

    @cached_property
    def mu(self) -> int:
        return _integral_degree(self.lattice, self.r)

    @property
    def zeta(self) -> complex:
        w2 = self.lattice.omega2
        return w2 / abs(w2)

    @cached_property
    def chi_values(self) -> Tuple[complex, complex]:
        chi1 = cmath.exp(-2j * math.pi * float(self.s))
        chi2 = cmath.exp(2j * math.pi * float(self.mu * self.rho))
        return chi1, chi2

    def chi(self, a: int, b: int) -> complex:
        """Semicharacter value at a*omega1 + b*omega2 (Appell-Humbert extension)."""
        chi1, chi2 = self.chi_values
        sign = -1.0 if (self.mu * a * b) % 2 else 1.0
        return sign * chi1**a * chi2**b

    def metric_weight(self, z):
        """Gaussian weight exp(-2*pi*lambda*|z|^2) of the canonical metric."""
        z = np.asarray(z)
        return np.exp(-TWO_PI * self.lam * (z.real**2 + z.imag**2))

    def conjugate_bundle(self) -> "LineBundleData":
        """Bundle on the other curve carrying the check-map images.

        Its semicharacter is chi_new(w) = conj(chi(-conj(w))); the matching
        characteristic (rho', s') is computed exactly from the integer
        coordinates of -conj(omega1), -conj(omega2).
        """
        mu = self.mu
        a1, b1 = self.lattice.int_coords(-self.lattice.omega1.conjugate())
        a2, b2 = self.lattice.int_coords(-self.lattice.omega2.conjugate())
        # conj(chi(a, b)) = exp(-2 pi i (-s*a + mu*rho*b + mu*a*b/2))
        s_new = (-self.s * a1 + mu * self.rho * b1 + Fraction(mu * a1 * b1, 2)) % 1
        rho_new = ((self.s * a2 - mu * self.rho * b2 - Fraction(mu * a2 * b2, 2)) / mu) % Fraction(1, mu)
        return dataclasses.replace(self, tag=self.tag.other(), rho=rho_new, s=s_new)

    def descriptor(self) -> dict:
        lat = self.lattice
        return {
            "r": self.r,
            "tag": self.tag.value,
            "rho": str(self.rho),
            "s": str(self.s),
            "lattice": {
                "omega1": [lat.omega1.real, lat.omega1.imag],
                "omega2": [lat.omega2.real, lat.omega2.imag],
                "beta0_im": lat.beta0.imag,
            },
        }

    def same_space(self, other: "LineBundleData") -> bool:
        return (
            self.r == other.r
            and self.tag is other.tag
            and self.lattice == other.lattice
        )


def degree_mu(bundle: LineBundleData) -> int:
    """Degree mu = 2*lambda*Im(conj(omega2)*omega1); asserts integrality."""
    return _integral_degree(bundle.lattice, bundle.r)


# ---------------------------------------------------------------------------
# sections


@dataclass(eq=False)
class Section:
    """Evaluable section tagged with its bundle.

    coeffs, when present, are the coordinates in the canonical basis
    (basis_section j = 0..mu-1).  Sections arising from maps that are not
    basis combinations (e.g. check-map images) carry coeffs = None.
    """

    bundle: LineBundleData
    coeffs: Optional[np.ndarray]
    _eval: Callable
    _deriv: Optional[Callable] = None

    def __call__(self, u):
        return _vector_apply(self._eval, u)

    def deriv(self, u):
        if self._deriv is None:
            raise ValueError("section has no derivative evaluator")
        return _vector_apply(self._deriv, u)

    def _binary_guard(self, other: "Section"):
        if not self.bundle.same_space(other.bundle):
            raise BundleMismatch("sections live on different bundles")

    def __add__(self, other: "Section") -> "Section":
        self._binary_guard(other)
        coeffs = None
        if self.coeffs is not None and other.coeffs is not None:
            coeffs = self.coeffs + other.coeffs
        f, g = self._eval, other._eval
        df, dg = self._deriv, other._deriv
        deriv = (lambda u: df(u) + dg(u)) if (df and dg) else None
        return Section(self.bundle, coeffs, lambda u: f(u) + g(u), deriv)

    def __sub__(self, other: "Section") -> "Section":
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "Section":
        c = complex(scalar)
        coeffs = None if self.coeffs is None else c * self.coeffs
        f, df = self._eval, self._deriv
        deriv = (lambda u: c * df(u)) if df else None
        return Section(self.bundle, coeffs, lambda u: c * f(u), deriv)

    __mul__ = __rmul__

    def __neg__(self) -> "Section":
        return (-1.0) * self

    def to_json(self) -> dict:
        if self.coeffs is None:
            raise ValueError("section has no canonical-basis coefficients")
        return {
            "bundle": self.bundle.descriptor(),
            "coeffs": [[c.real, c.imag] for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Section":
        desc = data["bundle"]
        lat_desc = desc["lattice"]
        lat = Lattice(
            omega1=complex(*lat_desc["omega1"]),
            omega2=complex(*lat_desc["omega2"]),
            beta0=complex(0.0, lat_desc["beta0_im"]),
        )
        bundle = LineBundleData(
            lattice=lat,
            r=desc["r"],
            tag=CurveTag(desc["tag"]),
            rho=Fraction(desc["rho"]),
            s=Fraction(desc["s"]),
        )
        coeffs = np.array([complex(re, im) for re, im in data["coeffs"]])
        return section_from_coeffs(bundle, coeffs)


def zero_section(bundle: LineBundleData) -> Section:
    mu = bundle.mu
    return Section(
        bundle,
        np.zeros(mu, dtype=complex),
        lambda u: np.zeros_like(u),
        lambda u: np.zeros_like(u),
    )


def _basis_closures(bundle: LineBundleData, j: int, tol: float):
    lat = bundle.lattice
    mu = bundle.mu
    lam = bundle.lam
    w2 = lat.omega2
    z = lat.omega1 / w2
    # zeta^-2 computed as (conj(omega2)/|omega2|)^2 for stability
    zeta_m2 = (w2.conjugate() / abs(w2)) ** 2
    rho_j = bundle.rho + Fraction(j, mu)
    s = bundle.s
    mu_z = mu * z
    y_mod = mu_z.imag
    scale = mu / w2
    pref_c = math.pi * lam * zeta_m2

    # The theta factor peaks at exp(pi*Im(w)^2/Im(mu z)); pulling that out of
    # the sum keeps intermediate magnitudes representable whenever the
    # section value itself is.
    def evaluate(flat):
        w = scale * flat
        shift = np.pi * w.imag**2 / y_mod
        vals = _theta_flat(w, mu_z, rho_j, s, tol, False, shift)
        return np.exp(pref_c * flat * flat + shift) * vals

    def derivative(flat):
        w = scale * flat
        shift = np.pi * w.imag**2 / y_mod
        th = _theta_flat(w, mu_z, rho_j, s, tol, False, shift)
        th_du = _theta_flat(w, mu_z, rho_j, s, tol, True, shift)
        return np.exp(pref_c * flat * flat + shift) * (2.0 * pref_c * flat * th + scale * th_du)

    return evaluate, derivative


def basis_section(bundle: LineBundleData, j: int, rho=None, s=None,
                  tol: float = DEFAULT_TOL) -> Section:
    """Canonical basis section with characteristic (rho + j/mu, s)."""
    if rho is not None or s is not None:
        bundle = dataclasses.replace(
            bundle,
            rho=Fraction(rho) if rho is not None else bundle.rho,
            s=Fraction(s) if s is not None else bundle.s,
        )
    mu = bundle.mu
    if not 0 <= j < mu:
        raise IndexOutOfRange(f"basis index {j} outside [0, {mu})")
    coeffs = np.zeros(mu, dtype=complex)
    coeffs[j] = 1.0
    evaluate, derivative = _basis_closures(bundle, j, tol)
    return Section(bundle, coeffs, evaluate, derivative)


def basis(bundle: LineBundleData, tol: float = DEFAULT_TOL):
    """The full canonical basis (length mu)."""
    return [basis_section(bundle, j, tol=tol) for j in range(bundle.mu)]


def section_from_coeffs(bundle: LineBundleData, coeffs, tol: float = DEFAULT_TOL) -> Section:
    """Linear combination of canonical basis sections."""
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape != (bundle.mu,):
        raise ValueError(f"need {bundle.mu} coefficients, got shape {coeffs.shape}")
    active = [(c, _basis_closures(bundle, j, tol)) for j, c in enumerate(coeffs) if c != 0]

    def evaluate(flat):
        total = np.zeros(flat.shape, dtype=complex)
        for c, (ev, _) in active:
            total += c * ev(flat)
        return total

    def derivative(flat):
        total = np.zeros(flat.shape, dtype=complex)
        for c, (_, dv) in active:
            total += c * dv(flat)
        return total

    return Section(bundle, coeffs, evaluate, derivative)


# ---------------------------------------------------------------------------
# factor of automorphy


def translation_factor(bundle: LineBundleData, omega: complex, u):
    """j(omega, u) for the lattice translation u -> u + omega.

    Sections of the bundle satisfy f(u + omega) = j(omega, u) f(u) with
    j(omega, u) = chi(omega) exp(2*pi*lambda*(conj(omega)*u + |omega|^2/2)).
    """
    a, b = bundle.lattice.int_coords(omega)
    u = np.asarray(u, dtype=complex)
    lam = bundle.lam
    phase = bundle.chi(a, b)
    out = phase * np.exp(TWO_PI * lam * (omega.conjugate() * u + abs(omega) ** 2 / 2.0))
    return complex(out) if out.ndim == 0 else out


def factor_of_automorphy(bundle: LineBundleData, alpha: complex, u):
    """Automorphy factor for the abstract lattice element alpha.

    The translation realized on the curve is embed(alpha, tag): conj(alpha)
    on E and alpha itself on E'.  Raises NotInLattice for non-elements.
    """
    t = embed(alpha, bundle.tag)
    return translation_factor(bundle, t, u)
