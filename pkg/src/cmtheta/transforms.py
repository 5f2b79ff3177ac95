"""Cohomological transforms between the two conjugate curves.

penrose_dolbeault sends a section of the level-r bundle on one curve to a
(0,1)-form at level -r on the conjugate curve,

    phi  |->  -phi(-conj(z)) exp(-2 pi lambda |z|^2) dconj(z),

the Dolbeault shadow of the relative-form kernel phi * exp(2 pi lambda z z')
pulled back along the smooth section z -> (z, -conj z) of the product space
W = (C x C)/R.  Classes are compared exclusively through their Serre-pairing
vectors against the canonical dual basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict

import numpy as np

from .errors import BundleMismatch
from .lattice import CurveTag, Lattice
from .pairing import (
    DEFAULT_QUAD_N,
    DolbeaultForm,
    basis_grid_values,
    quadrature_grid,
    serre_pairing,
    zero_form,
)
from .theta import LineBundleData, Section, basis

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# check map


def check_map(phi: Section) -> Section:
    """Antilinear bijection z -> -conj(phi(-conj z)) onto the conjugate curve.

    The image satisfies the other curve's automorphy law; applying the map
    twice returns the original section.
    """
    ev = phi._eval
    dv = phi._deriv
    bundle = phi.bundle.conjugate_bundle()

    def evaluate(flat):
        return -np.conj(ev(-np.conj(flat)))

    deriv = None
    if dv is not None:
        def deriv(flat):
            return np.conj(dv(-np.conj(flat)))

    return Section(bundle, None, evaluate, deriv)


# ---------------------------------------------------------------------------
# relative forms on W and their Dolbeault pullbacks


@dataclass(eq=False)
class RelativeForm:
    """Relative 1-form k(z, z') dz or dz' on W = (C x C)/R.

    direction names the factor whose differential appears: CurveTag.E for dz
    (first factor), CurveTag.EPRIME for dz' (second factor).
    """

    source_bundle: LineBundleData
    direction: CurveTag
    coefficient: Callable  # k(z, zprime), broadcasting

    def pullback(self, target: CurveTag) -> DolbeaultForm:
        """(0,1)-part of the pullback along the target curve's smooth section.

        Sections used: z -> (z, -conj z) over the first curve and
        z' -> (-conj z', z') over the second.  A dz'-form pulled back over
        the second curve (or dz over the first) has no (0,1)-part: the fiber
        coordinate is then holomorphic in the base variable, so the class is
        zero.  This is what kills the opposite-type boundary coefficients.
        """
        k = self.coefficient
        if target is CurveTag.E:
            if self.direction is CurveTag.EPRIME:
                def coeff(z):
                    z = np.asarray(z, dtype=complex)
                    return -k(z, -np.conj(z))
                return DolbeaultForm(self._dual_bundle(target), coeff)
            return zero_form(self._dual_bundle(target))
        if self.direction is CurveTag.E:
            def coeff(zp):
                zp = np.asarray(zp, dtype=complex)
                return -k(-np.conj(zp), zp)
            return DolbeaultForm(self._dual_bundle(target), coeff)
        return zero_form(self._dual_bundle(target))

    def _dual_bundle(self, target: CurveTag) -> LineBundleData:
        if target is self.source_bundle.tag:
            return self.source_bundle
        return self.source_bundle.conjugate_bundle()


def penrose_relative(phi: Section) -> RelativeForm:
    """Relative-form kernel phi * exp(2 pi lambda z z') in phi's own direction."""
    lam = phi.bundle.lam
    tag = phi.bundle.tag

    if tag is CurveTag.EPRIME:
        def k(z, zprime):
            return phi(zprime) * np.exp(TWO_PI * lam * np.asarray(z) * np.asarray(zprime))
    else:
        def k(z, zprime):
            return phi(z) * np.exp(TWO_PI * lam * np.asarray(z) * np.asarray(zprime))

    return RelativeForm(phi.bundle, tag, k)


def relative_kernel(phi: Section, z, zprime):
    """Value of the relative-form coefficient at (z, z')."""
    return penrose_relative(phi).coefficient(z, zprime)


def penrose_dolbeault(phi: Section) -> DolbeaultForm:
    """Dolbeault image of a section on the conjugate curve (closed form).

    Equals penrose_relative(phi).pullback(other curve); the explicit
    coefficient -phi(-conj z) exp(-2 pi lambda |z|^2) is used directly.
    """
    lam = phi.bundle.lam
    dual = phi.bundle.conjugate_bundle()

    def coeff(z):
        z = np.asarray(z, dtype=complex)
        return -phi(-np.conj(z)) * np.exp(-TWO_PI * lam * (z.real**2 + z.imag**2))

    return DolbeaultForm(dual, coeff)


def product_kernel(f: Section, fprime: Section, z, zprime):
    """f(z) f'(z') exp(2 pi lambda z z'), invariant under (z, z') -> (z+conj a, z'-a)."""
    if f.bundle.r != fprime.bundle.r or f.bundle.lattice != fprime.bundle.lattice:
        raise BundleMismatch("product kernel needs equal levels on one lattice")
    if not (f.bundle.tag is CurveTag.E and fprime.bundle.tag is CurveTag.EPRIME):
        raise BundleMismatch("product kernel pairs an E-section with an E'-section")
    lam = f.bundle.lam
    return f(z) * fprime(zprime) * np.exp(TWO_PI * lam * np.asarray(z) * np.asarray(zprime))


# ---------------------------------------------------------------------------
# cohomology classes


@dataclass(eq=False)
class CohomologyClass:
    """Degree-1 class represented by a Dolbeault form.

    Identified by its Serre pairings against the canonical basis of the dual
    level (the pairing is perfect, so the vector determines the class).

    verify_well_formed controls the sampled periodicity guard inside the
    pairings.  It is switched off for coefficients recovered by contour
    extraction from a multi-level series: those are machine-accurate on the
    fundamental domain (all the pairing ever evaluates) but lose relative
    precision far outside it, where the top level dominates the evaluation.
    """

    form: DolbeaultForm
    verify_well_formed: bool = True
    _pairings: Dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def tag(self) -> CurveTag:
        return self.form.tag

    @property
    def level(self) -> int:
        return self.form.level

    def pairing_vector(self, n: int = DEFAULT_QUAD_N) -> np.ndarray:
        if n not in self._pairings:
            dual_basis = basis(self.form.dual_bundle)
            self._pairings[n] = np.array(
                [serre_pairing(self.form, sec, n, check=self.verify_well_formed)
                 for sec in dual_basis]
            )
        return self._pairings[n]


def class_equal(a: CohomologyClass, b: CohomologyClass, tol: float,
                n: int = DEFAULT_QUAD_N) -> bool:
    """True iff the pairing vectors agree within tol componentwise."""
    if a.tag is not b.tag or a.level != b.level or a.form.lattice != b.form.lattice:
        raise BundleMismatch("classes live on different curves or levels")
    va, vb = a.pairing_vector(n), b.pairing_vector(n)
    scale = 1.0 + np.maximum(np.abs(va), np.abs(vb))
    return bool(np.all(np.abs(va - vb) <= tol * scale))


def class_deviation(a: CohomologyClass, b: CohomologyClass,
                    n: int = DEFAULT_QUAD_N) -> float:
    va, vb = a.pairing_vector(n), b.pairing_vector(n)
    scale = 1.0 + np.maximum(np.abs(va), np.abs(vb))
    return float(np.max(np.abs(va - vb) / scale))


# ---------------------------------------------------------------------------
# transform matrix and duality (batched over the basis)


def transform_matrix(lattice: Lattice, r: int, rho=0, s=0,
                     n: int = DEFAULT_QUAD_N) -> np.ndarray:
    """M[j][k] = (image form of basis'_j, basis_k): the bijectivity witness."""
    from fractions import Fraction

    src = LineBundleData(lattice, r, CurveTag.EPRIME, Fraction(rho), Fraction(s))
    dual = src.conjugate_bundle()
    grid = quadrature_grid(lattice, n)
    lam = src.lam
    weight = np.exp(-TWO_PI * lam * np.abs(grid.nodes) ** 2) * grid.weight
    # image coefficients -b'_j(-conj z) e^{-2 pi lam |z|^2} on the grid
    src_at = np.stack([sec(-np.conj(grid.nodes)) for sec in basis(src)])
    dual_at = basis_grid_values(dual, n)
    return (-src_at * weight) @ dual_at.T


def duality_matrices(lattice: Lattice, r: int, n: int = DEFAULT_QUAD_N):
    """(H, P) with H[j][k] = <b'_j, b'_k> and P[j][k] = (image of b'_j, check b'_k)."""
    src = LineBundleData(lattice, r, CurveTag.EPRIME)
    grid = quadrature_grid(lattice, n)
    lam = src.lam
    w = grid.weight
    mw = np.exp(-TWO_PI * lam * np.abs(grid.nodes) ** 2)
    vals = basis_grid_values(src, n)
    H = (vals * (mw * w)) @ vals.conj().T
    img = np.stack([sec(-np.conj(grid.nodes)) for sec in basis(src)])
    # (image of b'_j)(z) = -b'_j(-conj z) mw(z); (check b'_k)(z) = -conj(b'_k(-conj z))
    P = ((-img) * (mw * w)) @ (-np.conj(img)).T
    return H, P


# ---------------------------------------------------------------------------
# dbar-exact perturbations (Stokes probes)


def dbar_exact_form(psi: Section, freq: int = 1) -> DolbeaultForm:
    """The exact form dbar(g) for g = bump * conj(psi) * metric weight.

    g transforms as a smooth dual-bundle coefficient on psi's curve, so the
    result is a well-formed (0,1)-form at level -r whose class is zero; its
    Serre pairing against any section must vanish.
    """
    lat = psi.bundle.lattice
    lam = psi.bundle.lam
    d = (lat.omega2.conjugate() * lat.omega1).imag
    dbump_factor = -np.pi * freq * lat.omega2 / d

    def coeff(z):
        z = np.asarray(z, dtype=complex)
        acoord = (np.conj(lat.omega2) * z).imag / d
        bump = np.exp(2j * np.pi * freq * acoord)
        mw = np.exp(-TWO_PI * lam * (z.real**2 + z.imag**2))
        core = np.conj(psi.deriv(z)) - TWO_PI * lam * z * np.conj(psi(z))
        return mw * (dbump_factor * bump * np.conj(psi(z)) + bump * core)

    return DolbeaultForm(psi.bundle, coeff)
