import numpy as np
import pytest

from cmtheta.errors import BundleMismatch
from cmtheta.lattice import CurveTag, random_points, random_points_centered
from cmtheta.pairing import hermitian_inner, periodicity_defect, serre_pairing
from cmtheta.theta import (
    LineBundleData,
    basis,
    basis_section,
    section_from_coeffs,
    translation_factor,
    zero_section,
)
from cmtheta.transforms import (
    CohomologyClass,
    check_map,
    class_deviation,
    class_equal,
    dbar_exact_form,
    duality_matrices,
    penrose_dolbeault,
    penrose_relative,
    product_kernel,
    relative_kernel,
    transform_matrix,
)


@pytest.fixture(scope="module")
def bundles(default_lattice):
    return {
        (r, tag): LineBundleData(default_lattice, r, tag)
        for r in (1, 2, 3)
        for tag in (CurveTag.E, CurveTag.EPRIME)
    }


def test_check_map_zero_and_antilinearity(bundles, rng):
    src = bundles[(1, CurveTag.EPRIME)]
    z = random_points(src.lattice, rng, 20)
    zero_img = check_map(zero_section(src))
    assert np.max(np.abs(zero_img(z))) == 0
    phi = basis_section(src, 1)
    c = 0.7 - 1.9j
    lhs = check_map(c * phi)(z)
    rhs = np.conj(c) * check_map(phi)(z)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(1 + np.abs(rhs))


def test_check_map_lands_on_other_curve(bundles, rng):
    src = bundles[(2, CurveTag.EPRIME)]
    lat = src.lattice
    img = check_map(basis_section(src, 2))
    assert img.bundle.tag is CurveTag.E
    u = random_points(lat, rng, 50)
    for omega in (lat.omega1, lat.omega2):
        lhs = img(u + omega)
        rhs = translation_factor(img.bundle, omega, u) * img(u)
        assert np.max(np.abs(lhs - rhs) / (1.0 + np.abs(lhs))) <= 1e-9


def test_check_map_involution(bundles, rng):
    src = bundles[(1, CurveTag.EPRIME)]
    phi = basis_section(src, 3)
    back = check_map(check_map(phi))
    z = random_points(src.lattice, rng, 25)
    assert np.max(np.abs(back(z) - phi(z))) <= 1e-12 * np.max(1 + np.abs(phi(z)))


def test_image_form_well_formed(bundles, rng):
    src = bundles[(1, CurveTag.EPRIME)]
    for j in range(src.mu):
        form = penrose_dolbeault(basis_section(src, j))
        probe = basis_section(form.dual_bundle, j % form.dual_bundle.mu)
        assert periodicity_defect(form, probe, rng) <= 1e-8


def test_image_of_zero_section(bundles):
    src = bundles[(1, CurveTag.EPRIME)]
    form = penrose_dolbeault(zero_section(src))
    grid = np.array([0.1 + 0.2j, -0.3 + 0.1j])
    assert np.max(np.abs(form.coefficient(grid))) == 0


@pytest.mark.parametrize("r", [1, 2])
def test_duality_identity_basis_pairs(bundles, r):
    src = bundles[(r, CurveTag.EPRIME)]
    secs = basis(src)
    for p1 in secs:
        for p2 in secs:
            lhs = hermitian_inner(p1, p2, n=64)
            rhs = serre_pairing(penrose_dolbeault(p1), check_map(p2), n=64)
            assert abs(lhs - rhs) <= 1e-7 * (1 + abs(lhs))


def test_duality_identity_mirror_side(bundles):
    # E-side sections, image classes on E'
    src = bundles[(1, CurveTag.E)]
    secs = basis(src)
    for p1 in secs[:2]:
        for p2 in secs[:2]:
            lhs = hermitian_inner(p1, p2, n=64)
            rhs = serre_pairing(penrose_dolbeault(p1), check_map(p2), n=64)
            assert abs(lhs - rhs) <= 1e-7 * (1 + abs(lhs))


def test_duality_identity_random_combos(bundles, rng):
    src = bundles[(2, CurveTag.EPRIME)]
    for _ in range(5):
        c1 = rng.standard_normal(src.mu) + 1j * rng.standard_normal(src.mu)
        c2 = rng.standard_normal(src.mu) + 1j * rng.standard_normal(src.mu)
        p1, p2 = section_from_coeffs(src, c1), section_from_coeffs(src, c2)
        lhs = hermitian_inner(p1, p2, n=64)
        rhs = serre_pairing(penrose_dolbeault(p1), check_map(p2), n=64)
        assert abs(lhs - rhs) <= 1e-7 * (1 + abs(lhs))


def test_image_linearity(bundles, rng):
    src = bundles[(1, CurveTag.EPRIME)]
    f0, f1 = basis_section(src, 0), basis_section(src, 1)
    a, b = 1.3 - 0.2j, -0.5 + 2.1j
    combined = penrose_dolbeault(a * f0 + b * f1)
    split = a * penrose_dolbeault(f0) + b * penrose_dolbeault(f1)
    z = random_points_centered(src.lattice, rng, 30, scale=1.0)
    dev = np.max(np.abs(combined.coefficient(z) - split.coefficient(z)))
    assert dev <= 1e-10 * (1 + np.max(np.abs(split.coefficient(z))))


def test_relative_kernel_zero_section(bundles):
    src = bundles[(1, CurveTag.EPRIME)]
    assert relative_kernel(zero_section(src), 0.3 + 0.1j, -0.2 + 0.4j) == 0


def test_relative_kernel_quasi_periodicity(bundles, rng):
    # h(z + conj(a), z' - a) = h(z, z') exp(-2 pi lambda (a z + b)), b = |a|^2/2
    src = bundles[(2, CurveTag.EPRIME)]
    lat = src.lattice
    lam = src.lam
    phi = basis_section(src, 1)
    z = random_points_centered(lat, rng, 20, scale=1.0)
    zp = random_points_centered(lat, rng, 20, scale=1.0)
    base = relative_kernel(phi, z, zp)
    for m, n in ((1, 0), (0, 1), (1, -1)):
        alpha = m * lat.omega1 + n * lat.omega2
        beta = abs(alpha) ** 2 / 2.0
        moved = relative_kernel(phi, z + np.conj(alpha), zp - alpha)
        law = base * np.exp(-2 * np.pi * lam * (alpha * z + beta))
        assert np.max(np.abs(moved - law) / (1.0 + np.abs(law))) <= 1e-9


def test_pullback_matches_closed_form(bundles, rng):
    src = bundles[(2, CurveTag.EPRIME)]
    phi = basis_section(src, 0)
    via_pullback = penrose_relative(phi).pullback(CurveTag.E)
    closed = penrose_dolbeault(phi)
    z = random_points_centered(src.lattice, rng, 100, scale=1.2)
    a = via_pullback.coefficient(z)
    b = closed.coefficient(z)
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(1 + np.abs(b))


def test_pullback_opposite_direction_vanishes(bundles):
    src = bundles[(1, CurveTag.EPRIME)]
    form = penrose_relative(basis_section(src, 0)).pullback(CurveTag.EPRIME)
    z = np.array([0.3 + 0.1j, -0.2 + 0.4j])
    assert np.max(np.abs(form.coefficient(z))) == 0


def test_product_kernel_invariance(bundles, rng):
    f = basis_section(bundles[(2, CurveTag.E)], 1)
    fp = basis_section(bundles[(2, CurveTag.EPRIME)], 4)
    lat = f.bundle.lattice
    z, zp = 0.31 + 0.17j, -0.12 + 0.4j
    base = product_kernel(f, fp, z, zp)
    for _ in range(10):
        m, n = rng.integers(-2, 3, 2)
        alpha = m * lat.omega1 + n * lat.omega2
        moved = product_kernel(f, fp, z + np.conj(alpha), zp - alpha)
        assert abs(moved - base) / abs(base) <= 1e-9


def test_product_kernel_bilinearity_and_zero(bundles):
    f = basis_section(bundles[(1, CurveTag.E)], 0)
    fp = basis_section(bundles[(1, CurveTag.EPRIME)], 1)
    z, zp = 0.2 + 0.1j, 0.05 - 0.3j
    assert product_kernel(zero_section(f.bundle), fp, z, zp) == 0
    lhs = product_kernel(2j * f, fp, z, zp)
    assert abs(lhs - 2j * product_kernel(f, fp, z, zp)) <= 1e-12 * abs(lhs)
    with pytest.raises(BundleMismatch):
        product_kernel(fp, f, z, zp)
    with pytest.raises(BundleMismatch):
        product_kernel(f, basis_section(bundles[(2, CurveTag.EPRIME)], 0), z, zp)


def test_class_equal_reflexive_and_exact_perturbation(bundles, rng):
    src = bundles[(1, CurveTag.EPRIME)]
    form = penrose_dolbeault(basis_section(src, 0))
    cls = CohomologyClass(form)
    assert class_equal(cls, cls, 1e-12)
    psi = basis_section(form.dual_bundle, 1)
    perturbed = CohomologyClass(form + dbar_exact_form(psi))
    assert class_equal(cls, perturbed, 1e-7)
    assert class_deviation(cls, perturbed) <= 1e-8


def test_class_equal_distinguishes_basis_images(bundles):
    src = bundles[(1, CurveTag.EPRIME)]
    c0 = CohomologyClass(penrose_dolbeault(basis_section(src, 0)))
    c1 = CohomologyClass(penrose_dolbeault(basis_section(src, 1)))
    assert not class_equal(c0, c1, 1e-7)


def test_class_equal_mismatch(bundles):
    a = CohomologyClass(penrose_dolbeault(basis_section(bundles[(1, CurveTag.EPRIME)], 0)))
    b = CohomologyClass(penrose_dolbeault(basis_section(bundles[(2, CurveTag.EPRIME)], 0)))
    with pytest.raises(BundleMismatch):
        class_equal(a, b, 1e-7)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_transform_matrix_nonsingular(default_lattice, r):
    m = transform_matrix(default_lattice, r, n=64)
    sv = np.linalg.svd(m, compute_uv=False)
    assert sv.min() / sv.max() > 1e-6
    assert np.isfinite(sv.max() / sv.min())


def test_transform_matrix_matches_direct_pairing(default_lattice):
    r = 1
    m = transform_matrix(default_lattice, r, n=64)
    src = LineBundleData(default_lattice, r, CurveTag.EPRIME)
    secs = basis(src)
    for j, k in ((0, 0), (1, 3), (2, 1)):
        form = penrose_dolbeault(secs[j])
        direct = serre_pairing(form, basis_section(form.dual_bundle, k), n=64)
        assert abs(m[j, k] - direct) <= 1e-10 * (1 + abs(direct))


def test_metric_transform_compatibility(default_lattice):
    # M[j][k] equals <b'_j, check-preimage of b_k>; check is an involution,
    # so the preimage of b_k on E is check_map(b_k) back on E'
    r = 1
    m = transform_matrix(default_lattice, r, n=64)
    src = LineBundleData(default_lattice, r, CurveTag.EPRIME)
    dual = src.conjugate_bundle()
    secs = basis(src)
    for j in range(src.mu):
        for k in range(dual.mu):
            inner = hermitian_inner(secs[j], check_map(basis_section(dual, k)), n=64)
            assert abs(m[j, k] - inner) <= 1e-8 * (1 + abs(inner))


def test_duality_matrices_agree_with_direct(default_lattice):
    h, p = duality_matrices(default_lattice, 1, n=64)
    src = LineBundleData(default_lattice, 1, CurveTag.EPRIME)
    secs = basis(src)
    assert np.max(np.abs(h - p) / (1 + np.abs(h))) <= 1e-7
    direct = hermitian_inner(secs[1], secs[1], n=64)
    assert abs(h[1, 1] - direct) <= 1e-10 * (1 + abs(direct))


def test_check_map_nontrivial_characteristic(square_lattice, rng):
    # conjugate-bundle characteristics (rho', s') must carry the image's law
    from fractions import Fraction

    lat = square_lattice
    bundle = LineBundleData(lat, 2, CurveTag.EPRIME, rho=Fraction(1, 8), s=Fraction(1, 3))
    img = check_map(basis_section(bundle, 1))
    u = random_points(lat, rng, 40)
    for omega in (lat.omega1, lat.omega2, lat.omega1 + lat.omega2):
        lhs = img(u + omega)
        rhs = translation_factor(img.bundle, omega, u) * img(u)
        assert np.max(np.abs(lhs - rhs) / (1.0 + np.abs(lhs))) <= 1e-9


def test_quadrature_convergence_on_transform_integrands(default_lattice):
    # doubling the grid moves every acceptance integrand by < 1e-9
    h64, p64 = duality_matrices(default_lattice, 2, n=64)
    h128, p128 = duality_matrices(default_lattice, 2, n=128)
    assert np.max(np.abs(h64 - h128)) < 1e-9
    assert np.max(np.abs(p64 - p128)) < 1e-9
    m64 = transform_matrix(default_lattice, 2, n=64)
    m128 = transform_matrix(default_lattice, 2, n=128)
    assert np.max(np.abs(m64 - m128)) < 1e-9


def test_conjugate_bundle_involution(square_lattice):
    from fractions import Fraction

    bundle = LineBundleData(square_lattice, 2, CurveTag.EPRIME,
                            rho=Fraction(1, 8), s=Fraction(1, 3))
    back = bundle.conjugate_bundle().conjugate_bundle()
    assert back.tag is bundle.tag
    assert np.allclose(back.chi_values, bundle.chi_values)
