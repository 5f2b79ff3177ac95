import math

import numpy as np
import pytest

from cmtheta.errors import BundleMismatch, NonPeriodicIntegrand
from cmtheta.lattice import CurveTag, random_points
from cmtheta.pairing import (
    DolbeaultForm,
    QuadratureGrid,
    gram_matrix,
    hermitian_inner,
    integrate_periodic,
    periodicity_defect,
    serre_pairing,
    zero_form,
)
from cmtheta.reports import matrix_report, matrix_to_csv
from cmtheta.theta import LineBundleData, basis, basis_section, section_from_coeffs, zero_section
from cmtheta.transforms import dbar_exact_form, penrose_dolbeault


def norm_target(bundle):
    return abs(bundle.lattice.omega2) / (2.0 * math.sqrt(bundle.lam))


def test_grid_tiles_area(default_lattice):
    grid = QuadratureGrid(default_lattice, 16)
    assert grid.nodes.shape == (256,)
    assert abs(grid.weight * 256 - default_lattice.area) < 1e-14
    with pytest.raises(ValueError):
        QuadratureGrid(default_lattice, 3)


def test_integrate_constant(square_lattice, default_lattice):
    assert abs(integrate_periodic(lambda z: np.ones_like(z), square_lattice, 16) - 1.0) < 1e-14
    assert abs(integrate_periodic(lambda z: 1.0, default_lattice, 8) - 2.0) < 1e-14


def test_integrate_oscillatory_mode(square_lattice):
    # exp(2 pi i a) with a the omega1-coordinate: exact zero for the trapezoid
    lat = square_lattice

    def f(z):
        z = np.asarray(z)
        a = (lat.omega2.conjugate() * z).imag / (lat.omega2.conjugate() * lat.omega1).imag
        return np.exp(2j * np.pi * a)

    assert abs(integrate_periodic(f, lat, 16)) < 1e-14


def test_quadrature_convergence(default_lattice):
    bundle = LineBundleData(default_lattice, 1, CurveTag.EPRIME)
    sec = basis_section(bundle, 0)
    vals = {}
    for n in (64, 128):
        vals[n] = hermitian_inner(sec, sec, n=n)
    assert abs(vals[64] - vals[128]) < 1e-9


@pytest.mark.parametrize("r", [1, 2, 3])
def test_norm_formula(default_lattice, r):
    bundle = LineBundleData(default_lattice, r, CurveTag.EPRIME)
    target = norm_target(bundle)
    for sec in basis(bundle):
        got = hermitian_inner(sec, sec, n=64)
        assert abs(got - target) / target <= 1e-8
        assert abs(got.imag) <= 1e-12 * target


def test_orthogonality(default_lattice):
    bundle = LineBundleData(default_lattice, 1, CurveTag.EPRIME)
    secs = basis(bundle)
    target = norm_target(bundle)
    for j in range(bundle.mu):
        for k in range(j + 1, bundle.mu):
            assert abs(hermitian_inner(secs[j], secs[k], n=64)) <= 1e-8 * target


def test_inner_hermitian_symmetry(default_lattice, rng):
    bundle = LineBundleData(default_lattice, 2, CurveTag.EPRIME)
    c1 = rng.standard_normal(bundle.mu) + 1j * rng.standard_normal(bundle.mu)
    c2 = rng.standard_normal(bundle.mu) + 1j * rng.standard_normal(bundle.mu)
    p1, p2 = section_from_coeffs(bundle, c1), section_from_coeffs(bundle, c2)
    a = hermitian_inner(p1, p2)
    b = hermitian_inner(p2, p1)
    assert abs(a - b.conjugate()) <= 1e-12 * (1 + abs(a))


def test_inner_zero_and_mismatch(default_lattice, square_lattice):
    b1 = LineBundleData(default_lattice, 1, CurveTag.EPRIME)
    b2 = LineBundleData(default_lattice, 2, CurveTag.EPRIME)
    b3 = LineBundleData(default_lattice, 1, CurveTag.E)
    sec = basis_section(b1, 0)
    assert abs(hermitian_inner(zero_section(b1), sec)) < 1e-15
    with pytest.raises(BundleMismatch):
        hermitian_inner(sec, basis_section(b2, 0))
    with pytest.raises(BundleMismatch):
        hermitian_inner(sec, basis_section(b3, 0))


def test_metric_weight_invariance(default_lattice, rng):
    # the inner-product integrand is invariant under lattice translations
    lat = default_lattice
    bundle = LineBundleData(lat, 2, CurveTag.EPRIME)
    f, g = basis_section(bundle, 0), basis_section(bundle, 3)

    def integrand(z):
        return f(z) * np.conj(g(z)) * bundle.metric_weight(z)

    z = random_points(lat, rng, 30)
    for omega in (lat.omega1, lat.omega2, lat.omega1 - lat.omega2):
        dev = np.max(np.abs(integrand(z + omega) - integrand(z))
                     / (1.0 + np.abs(integrand(z))))
        assert dev <= 1e-9


def test_gram_default(default_lattice):
    bundle = LineBundleData(default_lattice, 1, CurveTag.EPRIME)
    g = gram_matrix(bundle, n=64)
    target = norm_target(bundle)
    assert g.shape == (4, 4)
    assert np.max(np.abs(np.diag(g).real - target)) <= 1e-8 * target
    off = g - np.diag(np.diag(g))
    assert np.max(np.abs(off)) <= 1e-8 * target
    assert np.max(np.abs(g - g.conj().T)) <= 1e-12
    assert np.min(np.linalg.eigvalsh(g)) > 0
    assert np.linalg.matrix_rank(g, tol=1e-8 * np.linalg.norm(g)) == bundle.mu


def test_gram_square_lattice(square_lattice):
    bundle = LineBundleData(square_lattice, 1, CurveTag.EPRIME)
    g = gram_matrix(bundle, n=64)
    assert g.shape == (2, 2)
    target = norm_target(bundle)
    assert np.max(np.abs(np.diag(g).real - target)) <= 1e-8 * target
    assert abs(g[0, 1]) <= 1e-8 * target


def test_serre_pairing_zero_form(default_lattice):
    bundle = LineBundleData(default_lattice, 1, CurveTag.E)
    sec = basis_section(bundle, 0)
    assert serre_pairing(zero_form(bundle), sec) == 0


def test_serre_pairing_rejects_nonperiodic(default_lattice):
    bundle = LineBundleData(default_lattice, 1, CurveTag.E)
    bogus = DolbeaultForm(bundle, lambda z: np.asarray(z, dtype=complex))
    with pytest.raises(NonPeriodicIntegrand):
        serre_pairing(bogus, basis_section(bundle, 0))


def test_serre_pairing_mismatch(default_lattice):
    b_r1 = LineBundleData(default_lattice, 1, CurveTag.EPRIME)
    b_r2 = LineBundleData(default_lattice, 2, CurveTag.EPRIME)
    form = penrose_dolbeault(basis_section(b_r1, 0))
    with pytest.raises(BundleMismatch):
        serre_pairing(form, basis_section(b_r2, 0))


def test_stokes_oracle_exact_term_integrates_to_zero(default_lattice, rng):
    # independent oracle: quadrature of the exact term itself must vanish
    bundle = LineBundleData(default_lattice, 1, CurveTag.E)
    psi = basis_section(bundle, 1)
    exact = dbar_exact_form(psi, freq=2)
    assert periodicity_defect(exact, basis_section(bundle, 0), rng) <= 1e-9
    for k in range(bundle.mu):
        assert abs(serre_pairing(exact, basis_section(bundle, k))) <= 1e-8


def test_serre_pairing_descends_to_cohomology(default_lattice, rng):
    bundle = LineBundleData(default_lattice, 1, CurveTag.E)
    source = LineBundleData(default_lattice, 1, CurveTag.EPRIME)
    form = penrose_dolbeault(basis_section(source, 0))
    phi = basis_section(bundle, 2)
    base = serre_pairing(form, phi)
    for trial in range(5):
        psi = section_from_coeffs(
            bundle, rng.standard_normal(bundle.mu) + 1j * rng.standard_normal(bundle.mu))
        perturbed = form + dbar_exact_form(psi, freq=trial % 3)
        moved = serre_pairing(perturbed, phi)
        assert abs(moved - base) <= 1e-8 * (1 + abs(base))


def test_gram_emission(tmp_path, default_lattice):
    bundle = LineBundleData(default_lattice, 1, CurveTag.EPRIME)
    g = gram_matrix(bundle, n=32)
    csv_path = tmp_path / "gram.csv"
    matrix_to_csv(csv_path, g)
    lines = csv_path.read_text().strip().splitlines()
    assert len(lines) == 1 + 4
    assert lines[0].split(",")[:2] == ["re_0", "im_0"]
    row0 = [float(x) for x in lines[1].split(",")]
    assert abs(row0[0] - g[0, 0].real) < 1e-15
    rep = matrix_report(g, {"r": 1})
    assert rep["r"] == 1 and len(rep["matrix"]) == 4


def test_gram_characteristic_independence(default_lattice):
    from fractions import Fraction

    # the norm is |w2|/(2 sqrt(lambda)) for every characteristic
    bundle = LineBundleData(default_lattice, 1, CurveTag.EPRIME)
    g = gram_matrix(bundle, rho=Fraction(1, 8), s=Fraction(1, 3), n=64)
    target = norm_target(bundle)
    assert np.max(np.abs(np.diag(g).real - target)) <= 1e-8 * target
    off = g - np.diag(np.diag(g))
    assert np.max(np.abs(off)) <= 1e-8 * target
