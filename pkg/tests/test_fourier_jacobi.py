import json

import numpy as np
import pytest

from cmtheta.errors import BundleMismatch, NonPeriodicInput, UnsupportedIndex
from cmtheta.fourier_jacobi import (
    FJSeries,
    FJSide,
    boundary_class,
    coefficient_identity_report,
    extract_coefficient,
    heisenberg_shift,
    opposite_component_pairings,
    random_series,
)
from cmtheta.lattice import CurveTag, random_points_centered
from cmtheta.theta import LineBundleData, basis_section, translation_factor
from cmtheta.transforms import CohomologyClass, class_equal, penrose_dolbeault


@pytest.fixture(scope="module")
def y_series(default_lattice):
    rng = np.random.default_rng(77)
    return random_series(default_lattice, FJSide.Y, 3, rng)


def single_term_series(lat, side=FJSide.Y, r=1, j=0):
    bundle = LineBundleData(lat, r, side.curve)
    return FJSeries(side, lat, {r: basis_section(bundle, j)})


def test_empty_series_evaluates_to_zero(default_lattice):
    series = FJSeries(FJSide.Y, default_lattice, {})
    assert series.evaluate(0.3 + 0.1j, 0.5 + 0.2j) == 0


def test_single_term_value(default_lattice):
    lat = default_lattice
    series = single_term_series(lat)
    sec = series.terms[1]
    v, w = 0.2 + 0.1j, 0.8 + 0.3j
    want = sec(v) * np.exp(-2j * np.pi * w / lat.beta0)
    assert abs(series.evaluate(v, w) - want) <= 1e-12 * (1 + abs(want))


def test_series_validation(default_lattice):
    lat = default_lattice
    good = basis_section(LineBundleData(lat, 1, CurveTag.EPRIME), 0)
    with pytest.raises(ValueError):
        FJSeries(FJSide.Y, lat, {0: good})
    with pytest.raises(BundleMismatch):
        FJSeries(FJSide.X, lat, {1: good})
    with pytest.raises(BundleMismatch):
        FJSeries(FJSide.Y, lat, {2: good})


@pytest.mark.parametrize("side", [FJSide.Y, FJSide.X])
def test_heisenberg_invariance(default_lattice, side, rng):
    lat = default_lattice
    series = random_series(lat, side, 3, rng)
    first = 0.3 + 0.1j if side is FJSide.Y else 0.9 + 0.4j
    second = 0.7 + 0.4j if side is FJSide.Y else 0.25 - 0.15j
    base = series.evaluate(first, second)
    for m, n, k in ((1, 0, 1), (0, 1, -2), (1, -1, 0), (-1, 0, 3)):
        alpha = m * lat.omega1 + n * lat.omega2
        beta = abs(alpha) ** 2 / 2.0 + 1j * k
        fs, ss = heisenberg_shift(side, alpha, beta, first, second)
        moved = series.evaluate(fs, ss)
        assert abs(moved - base) / (1 + abs(base)) <= 1e-9


def test_roundtrip_all_levels(default_lattice, y_series, rng):
    angles = random_points_centered(default_lattice, rng, 20)
    for r, sec in y_series.terms.items():
        got = extract_coefficient(y_series.evaluate, r, angles, default_lattice, FJSide.Y)
        assert np.max(np.abs(got - sec(angles))) <= 1e-8


def test_roundtrip_x_side(default_lattice, rng):
    series = random_series(default_lattice, FJSide.X, 3, rng)
    angles = random_points_centered(default_lattice, rng, 20)
    for r, sec in series.terms.items():
        got = extract_coefficient(series.evaluate, r, angles, default_lattice, FJSide.X)
        assert np.max(np.abs(got - sec(angles))) <= 1e-8


def test_extraction_vanishing_indices(default_lattice, y_series, rng):
    angles = random_points_centered(default_lattice, rng, 20)
    for r in (0, -1, -3):
        got = extract_coefficient(y_series.evaluate, r, angles, default_lattice,
                                  FJSide.Y, check=False)
        assert np.max(np.abs(got)) <= 1e-10
    beyond = extract_coefficient(y_series.evaluate, y_series.r_max + 1, angles,
                                 default_lattice, FJSide.Y, check=False)
    assert np.max(np.abs(beyond)) <= 1e-10


def test_extraction_rejects_nonperiodic(default_lattice):
    def bogus(v, w):
        v = np.asarray(v, dtype=complex)
        w = np.asarray(w, dtype=complex)
        return np.exp(-1.7 * w) * np.ones_like(v)

    with pytest.raises(NonPeriodicInput):
        extract_coefficient(bogus, 1, 0.1 + 0.1j, default_lattice, FJSide.Y)


def test_extracted_coefficient_multiplier_consistency(default_lattice, rng):
    # the recovered coefficient obeys the same automorphy law as the bundle
    lat = default_lattice
    series = single_term_series(lat, FJSide.Y, r=2, j=1)
    bundle = series.terms[2].bundle

    def ghat(v):
        return extract_coefficient(series.evaluate, 2, v, lat, FJSide.Y, check=False)

    v = random_points_centered(lat, rng, 15)
    for omega in (lat.omega1, lat.omega2):
        lhs = ghat(v + omega)
        rhs = translation_factor(bundle, omega, v) * ghat(v)
        assert np.max(np.abs(lhs - rhs) / (1.0 + np.abs(lhs))) <= 1e-9


def test_boundary_class_single_term(default_lattice):
    series = single_term_series(default_lattice)
    cls = boundary_class(series, 1)
    assert cls.tag is CurveTag.E
    assert cls.level == -1
    vec = cls.pairing_vector()
    assert np.max(np.abs(vec)) > 1e-3
    image = CohomologyClass(penrose_dolbeault(series.terms[1]))
    assert class_equal(cls, image, 1e-7)


def test_boundary_class_unsupported_index(default_lattice):
    series = single_term_series(default_lattice)
    with pytest.raises(UnsupportedIndex):
        boundary_class(series, 2)
    with pytest.raises(UnsupportedIndex):
        opposite_component_pairings(series, 3)


def test_boundary_class_linearity(default_lattice):
    lat = default_lattice
    bundle = LineBundleData(lat, 1, CurveTag.EPRIME)
    a, b = 1.2 - 0.4j, 0.3 + 2.2j
    s0 = FJSeries(FJSide.Y, lat, {1: a * basis_section(bundle, 0)})
    s1 = FJSeries(FJSide.Y, lat, {1: b * basis_section(bundle, 1)})
    s01 = FJSeries(FJSide.Y, lat,
                   {1: a * basis_section(bundle, 0) + b * basis_section(bundle, 1)})
    v_sum = boundary_class(s0, 1).pairing_vector() + boundary_class(s1, 1).pairing_vector()
    v_comb = boundary_class(s01, 1).pairing_vector()
    assert np.max(np.abs(v_comb - v_sum)) <= 1e-9 * (1 + np.max(np.abs(v_sum)))


def test_opposite_component_vanishes(default_lattice, y_series):
    for r in y_series.terms:
        vec = opposite_component_pairings(y_series, r)
        assert np.max(np.abs(vec)) <= 1e-9


def test_report_single_term(default_lattice):
    series = single_term_series(default_lattice)
    report = coefficient_identity_report(series, 1, 1e-7)
    assert report["pass"]
    assert report["entries"][0]["r"] == 1 and report["entries"][0]["pass"]
    assert report["vanishing_r_nonpositive"]["pass"]
    assert report["opposite_component"]["pass"]


@pytest.mark.parametrize("side", [FJSide.Y, FJSide.X])
def test_report_random_series(default_lattice, side):
    rng = np.random.default_rng(4)
    series = random_series(default_lattice, side, 3, rng)
    report = coefficient_identity_report(series, 3, 1e-7, rng=rng)
    assert report["pass"], report
    assert [e["r"] for e in report["entries"]] == [1, 2, 3]
    assert all(e["pass"] for e in report["entries"])


def test_series_json_roundtrip(default_lattice, rng):
    series = random_series(default_lattice, FJSide.Y, 2, rng)
    data = json.loads(json.dumps(series.to_json()))
    back = FJSeries.from_json(data)
    v, w = 0.21 + 0.12j, 0.4 + 0.6j
    assert abs(back.evaluate(v, w) - series.evaluate(v, w)) <= 1e-10 * (
        1 + abs(series.evaluate(v, w)))
    assert back.side is FJSide.Y
