"""Periodic quadrature on the fundamental parallelogram and the pairings.

The canonical Hermitian inner product on level-r sections and the Serre
pairing between (0,1)-forms at level -r and sections at level r are both
plain-Lebesgue integrals over the fundamental parallelogram, evaluated with
the tensor trapezoidal rule (spectrally accurate for these smooth periodic
integrands).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import BundleMismatch, NonPeriodicIntegrand
from .lattice import CurveTag, Lattice
from .theta import LineBundleData, Section, basis

DEFAULT_QUAD_N = 64


@dataclass(eq=False)
class QuadratureGrid:
    """Uniform n x n grid on the half-open fundamental parallelogram."""

    lattice: Lattice
    n: int
    nodes: np.ndarray = field(init=False)
    weight: float = field(init=False)

    def __post_init__(self):
        if self.n < 4:
            raise ValueError("need at least 4 points per lattice direction")
        t = np.arange(self.n) / self.n
        a, b = np.meshgrid(t, t, indexing="ij")
        self.nodes = (a * self.lattice.omega1 + b * self.lattice.omega2).reshape(-1)
        self.weight = self.lattice.area / self.n**2


@lru_cache(maxsize=32)
def quadrature_grid(lat: Lattice, n: int) -> QuadratureGrid:
    return QuadratureGrid(lat, n)


def integrate_periodic(f: Callable, lat: Lattice, n: int = DEFAULT_QUAD_N) -> complex:
    """Tensor trapezoidal sum of a lattice-periodic function."""
    grid = quadrature_grid(lat, n)
    try:
        vals = np.asarray(f(grid.nodes), dtype=complex)
        if vals.shape != grid.nodes.shape:
            raise TypeError
    except (TypeError, ValueError):
        vals = np.array([f(z) for z in grid.nodes], dtype=complex)
    return complex(vals.sum() * grid.weight)


# ---------------------------------------------------------------------------
# Dolbeault forms


@dataclass(eq=False)
class DolbeaultForm:
    """(0,1)-form h(z, conj z) dconj(z) valued in the dual of a level-r bundle.

    dual_bundle is the level-r bundle its coefficient multiplies to a
    lattice-periodic function; the form itself sits at level -r on the same
    curve.  Well-formedness is checked by sampling, not assumed.
    """

    dual_bundle: LineBundleData
    coefficient: Callable

    @property
    def level(self) -> int:
        return -self.dual_bundle.r

    @property
    def tag(self) -> CurveTag:
        return self.dual_bundle.tag

    @property
    def lattice(self) -> Lattice:
        return self.dual_bundle.lattice

    def __add__(self, other: "DolbeaultForm") -> "DolbeaultForm":
        if not self.dual_bundle.same_space(other.dual_bundle):
            raise BundleMismatch("forms live on different bundles")
        f, g = self.coefficient, other.coefficient
        return DolbeaultForm(self.dual_bundle, lambda z: f(z) + g(z))

    def __rmul__(self, scalar) -> "DolbeaultForm":
        c = complex(scalar)
        f = self.coefficient
        return DolbeaultForm(self.dual_bundle, lambda z: c * f(z))

    __mul__ = __rmul__

    def __neg__(self) -> "DolbeaultForm":
        return (-1.0) * self


def zero_form(dual_bundle: LineBundleData) -> DolbeaultForm:
    return DolbeaultForm(dual_bundle, lambda z: np.zeros_like(np.asarray(z, dtype=complex)))


def periodicity_defect(form: DolbeaultForm, section: Section, rng=None,
                       samples: int = 20) -> float:
    """Max relative defect of coefficient*section under sampled lattice shifts.

    This is the well-formedness measure for a form valued in the dual bundle:
    the product with any section of the dual bundle must be lattice-periodic.
    """
    rng = np.random.default_rng(7) if rng is None else rng
    lat = form.lattice
    z = rng.random(samples) * lat.omega1 + rng.random(samples) * lat.omega2
    a = rng.integers(-2, 3, samples)
    b = rng.integers(-2, 3, samples)
    shift = a * lat.omega1 + b * lat.omega2
    base = form.coefficient(z) * section(z)
    moved = form.coefficient(z + shift) * section(z + shift)
    return float(np.max(np.abs(moved - base) / (1.0 + np.abs(base))))


# ---------------------------------------------------------------------------
# pairings


def hermitian_inner(phi1: Section, phi2: Section, n: int = DEFAULT_QUAD_N) -> complex:
    """<phi1, phi2> = int phi1 conj(phi2) exp(-2 pi lambda |z|^2) dA."""
    if not phi1.bundle.same_space(phi2.bundle):
        raise BundleMismatch("hermitian_inner needs sections of one bundle")
    bundle = phi1.bundle
    grid = quadrature_grid(bundle.lattice, n)
    vals = phi1(grid.nodes) * np.conj(phi2(grid.nodes)) * bundle.metric_weight(grid.nodes)
    return complex(vals.sum() * grid.weight)


def serre_pairing(omega: DolbeaultForm, phi: Section, n: int = DEFAULT_QUAD_N,
                  check: bool = True, check_tol: float = 1e-8) -> complex:
    """(omega, phi) = int coefficient(z) phi(z) dA over the parallelogram."""
    if not omega.dual_bundle.same_space(phi.bundle):
        raise BundleMismatch("form level/curve does not match the section")
    if check:
        defect = periodicity_defect(omega, phi)
        if defect > check_tol:
            raise NonPeriodicIntegrand(
                f"coefficient*section defect {defect:.3e} exceeds {check_tol:.1e}"
            )
    grid = quadrature_grid(omega.lattice, n)
    vals = omega.coefficient(grid.nodes) * phi(grid.nodes)
    return complex(vals.sum() * grid.weight)


def basis_grid_values(bundle: LineBundleData, n: int = DEFAULT_QUAD_N) -> np.ndarray:
    """Matrix (mu, n*n) of canonical basis values on the quadrature nodes."""
    grid = quadrature_grid(bundle.lattice, n)
    return np.stack([sec(grid.nodes) for sec in basis(bundle)])


def gram_matrix(bundle: LineBundleData, rho=None, s=None,
                n: int = DEFAULT_QUAD_N) -> np.ndarray:
    """mu x mu matrix of hermitian_inner over the canonical basis."""
    if rho is not None or s is not None:
        bundle = dataclasses.replace(
            bundle,
            rho=Fraction(rho) if rho is not None else bundle.rho,
            s=Fraction(s) if s is not None else bundle.s,
        )
    grid = quadrature_grid(bundle.lattice, n)
    values = basis_grid_values(bundle, n)
    weighted = values * (bundle.metric_weight(grid.nodes) * grid.weight)
    return weighted @ values.conj().T
