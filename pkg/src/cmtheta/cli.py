"""Batch front-end: every verification pipeline behind one subcommand each.

Exit codes: 0 all checks within tolerance, 1 at least one check failed
(first failing invariant on stderr), 2 configuration error.  Reports are
deterministic for a fixed config and seed.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import kernels
from .boundary import (
    BETA0_DEFAULT,
    FlagP2,
    GR,
    NilpotentElement,
    OrbitCase,
    chart_action_bplus,
    ChartState,
    classify_orbit_case,
    hermitian_dual_flag,
    no_two_cone_check,
    phases_equal,
    random_commuting_pair,
    random_heisenberg,
)
from .errors import CmThetaError, ConfigError
from .fourier_jacobi import (
    FJSide,
    coefficient_identity_report,
    extract_coefficient,
    random_series,
)
from .lattice import CurveTag, Lattice, random_elements, random_points, random_points_centered
from .pairing import gram_matrix, hermitian_inner, serre_pairing
from .reports import matrix_report, matrix_to_csv, write_json
from .theta import LineBundleData, basis, basis_section, section_from_coeffs, theta_series
from .transforms import (
    check_map,
    duality_matrices,
    penrose_dolbeault,
    product_kernel,
    transform_matrix,
)

SUBCOMMANDS = (
    "theta-eval",
    "basis",
    "gram",
    "eta-apply",
    "duality-check",
    "bijectivity",
    "fj-roundtrip",
    "theorem2-check",
    "orbit-classify",
    "no2cone",
    "kernel-invariance",
)


@dataclass
class RunConfig:
    lattice: Lattice
    r_max: int = 3
    rho: Fraction = Fraction(0)
    s: Fraction = Fraction(0)
    quad_n: int = 64
    tol: float = 1e-7
    seed: int = 0
    out: str | None = None

    def __post_init__(self):
        if self.tol <= 0:
            raise ConfigError("tolerance must be positive")
        if self.quad_n < 4:
            raise ConfigError("quadrature n must be at least 4")
        if self.r_max < 1:
            raise ConfigError("r range must start at 1 (r_max >= 1)")

    def echo(self) -> dict:
        lat = self.lattice
        return {
            "lattice": {
                "omega1": [lat.omega1.real, lat.omega1.imag],
                "omega2": [lat.omega2.real, lat.omega2.imag],
                "beta0_im": lat.beta0.imag,
            },
            "r_max": self.r_max,
            "rho": str(self.rho),
            "s": str(self.s),
            "quad_n": self.quad_n,
            "tol": self.tol,
            "seed": self.seed,
            "kernel_backend": kernels.backend_name(),
        }


_CONFIG_KEYS = {
    "omega1_re", "omega1_im", "omega2_re", "omega2_im", "beta0_im",
    "r_max", "rho", "s", "quad_n", "tol", "seed", "out",
}


def load_config(path: str | None, overrides: dict) -> RunConfig:
    fields: dict = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                for raw in fh:
                    line = raw.split("#", 1)[0].strip()
                    if not line:
                        continue
                    if "=" not in line:
                        raise ConfigError(f"malformed config line: {raw.strip()!r}")
                    key, value = (part.strip() for part in line.split("=", 1))
                    if key not in _CONFIG_KEYS:
                        raise ConfigError(f"unknown config key: {key!r}")
                    fields[key] = value
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    fields.update({k: v for k, v in overrides.items() if v is not None})

    lattice_keys = {"omega1_re", "omega1_im", "omega2_re", "omega2_im", "beta0_im"}
    if lattice_keys & fields.keys():
        lattice = Lattice.from_mapping({k: fields[k] for k in lattice_keys if k in fields})
    else:
        lattice = Lattice.default()
    try:
        return RunConfig(
            lattice=lattice,
            r_max=int(fields.get("r_max", 3)),
            rho=Fraction(str(fields.get("rho", 0))),
            s=Fraction(str(fields.get("s", 0))),
            quad_n=int(fields.get("quad_n", 64)),
            tol=float(fields.get("tol", 1e-7)),
            seed=int(fields.get("seed", 0)),
            out=fields.get("out"),
        )
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad config value: {exc}") from exc


# ---------------------------------------------------------------------------
# subcommand bodies: each returns (report, checks) with checks a list of
# {"name", "pass", ...}; overall pass is their conjunction.


def _bundle(cfg: RunConfig, r: int, tag: CurveTag) -> LineBundleData:
    return LineBundleData(cfg.lattice, r, tag, cfg.rho, cfg.s)


def _run_theta_eval(cfg: RunConfig, rng):
    lat = cfg.lattice
    z = lat.omega1 / lat.omega2
    pts = random_points(lat, rng, 12)
    checks = []
    base = theta_series(pts, z, cfg.rho, cfg.s, tol=1e-12)
    finer = theta_series(pts, z, cfg.rho, cfg.s, tol=1e-14)
    dev = float(np.max(np.abs(base - finer)))
    checks.append({"name": "truncation-soundness", "max_deviation": dev,
                   "tolerance": 1e-12, "pass": dev <= 1e-12})
    shift = float(np.max(np.abs(theta_series(pts + 1.0, z, cfg.rho, cfg.s)
                                - np.exp(2j * np.pi * float(cfg.rho))
                                * theta_series(pts, z, cfg.rho, cfg.s))))
    checks.append({"name": "integer-shift-identity", "max_deviation": shift,
                   "tolerance": 1e-9, "pass": shift <= 1e-9})
    report = {
        "values": {
            "theta(0, i)": [theta_series(0, 1j).real, theta_series(0, 1j).imag],
            "theta(0, omega1/omega2)": [theta_series(0, z).real, theta_series(0, z).imag],
        },
    }
    return report, checks


def _run_basis(cfg: RunConfig, rng):
    checks = []
    per_level = {}
    for r in range(1, cfg.r_max + 1):
        bundle = _bundle(cfg, r, CurveTag.EPRIME)
        g = gram_matrix(bundle, n=cfg.quad_n)
        rank = int(np.linalg.matrix_rank(g, tol=1e-8 * np.linalg.norm(g)))
        per_level[str(r)] = {"mu": bundle.mu, "gram_rank": rank}
        checks.append({"name": f"basis-complete-r{r}", "mu": bundle.mu,
                       "gram_rank": rank, "pass": rank == bundle.mu})
    return {"levels": per_level}, checks


def _run_gram(cfg: RunConfig, rng, out_base: Path | None):
    checks = []
    matrices = {}
    for r in range(1, cfg.r_max + 1):
        bundle = _bundle(cfg, r, CurveTag.EPRIME)
        g = gram_matrix(bundle, n=cfg.quad_n)
        target = abs(cfg.lattice.omega2) / (2.0 * np.sqrt(bundle.lam))
        diag = np.diag(g).real
        diag_dev = float(np.max(np.abs(diag - target) / target))
        off = g - np.diag(np.diag(g))
        off_dev = float(np.max(np.abs(off)) / target)
        herm_dev = float(np.max(np.abs(g - g.conj().T)))
        eig_min = float(np.min(np.linalg.eigvalsh(g)))
        checks.append({"name": f"norm-diagonal-r{r}", "max_deviation": diag_dev,
                       "tolerance": cfg.tol, "pass": diag_dev <= cfg.tol})
        checks.append({"name": f"orthogonality-r{r}", "max_deviation": off_dev,
                       "tolerance": cfg.tol, "pass": off_dev <= cfg.tol})
        checks.append({"name": f"hermitian-r{r}", "max_deviation": herm_dev,
                       "tolerance": 1e-12, "pass": herm_dev <= 1e-12})
        checks.append({"name": f"positive-definite-r{r}", "eig_min": eig_min,
                       "pass": eig_min > 0.0})
        matrices[str(r)] = matrix_report(g, {
            "lattice": cfg.echo()["lattice"],
            "r": r, "n_quadrature": cfg.quad_n, "norm_target": target,
        })
        if out_base is not None:
            matrix_to_csv(out_base.with_suffix(f".r{r}.csv"), g)
    return {"gram": matrices}, checks


def _run_eta_apply(cfg: RunConfig, rng, out_base: Path | None):
    checks = []
    data = {}
    for r in range(1, cfg.r_max + 1):
        src = _bundle(cfg, r, CurveTag.EPRIME)
        worst = 0.0
        for sec in basis(src):
            form = penrose_dolbeault(sec)
            probe = basis_section(form.dual_bundle, 0)
            from .pairing import periodicity_defect

            worst = max(worst, periodicity_defect(form, probe, rng))
        m = transform_matrix(cfg.lattice, r, cfg.rho, cfg.s, n=cfg.quad_n)
        data[str(r)] = matrix_report(m, {
            "lattice": cfg.echo()["lattice"],
            "r": r, "rho": str(cfg.rho), "s": str(cfg.s), "n_quadrature": cfg.quad_n,
        })
        if out_base is not None:
            matrix_to_csv(out_base.with_suffix(f".r{r}.csv"), m)
        checks.append({"name": f"image-well-formed-r{r}", "max_deviation": worst,
                       "tolerance": 1e-8, "pass": worst <= 1e-8})
    return {"pairing_matrices": data}, checks


def _run_duality(cfg: RunConfig, rng):
    checks = []
    for r in range(1, cfg.r_max + 1):
        h, p = duality_matrices(cfg.lattice, r, n=cfg.quad_n)
        dev = float(np.max(np.abs(h - p) / (1.0 + np.abs(h))))
        checks.append({"name": f"duality-basis-r{r}", "max_deviation": dev,
                       "tolerance": cfg.tol, "pass": dev <= cfg.tol})
        bundle = _bundle(cfg, r, CurveTag.EPRIME)
        worst = 0.0
        for _ in range(5):
            c1 = rng.standard_normal(bundle.mu) + 1j * rng.standard_normal(bundle.mu)
            c2 = rng.standard_normal(bundle.mu) + 1j * rng.standard_normal(bundle.mu)
            p1 = section_from_coeffs(bundle, c1)
            p2 = section_from_coeffs(bundle, c2)
            lhs = hermitian_inner(p1, p2, n=cfg.quad_n)
            rhs = serre_pairing(penrose_dolbeault(p1), check_map(p2), n=cfg.quad_n)
            worst = max(worst, abs(lhs - rhs) / (1.0 + abs(lhs)))
        checks.append({"name": f"duality-random-r{r}", "max_deviation": worst,
                       "tolerance": cfg.tol, "pass": worst <= cfg.tol})
    return {}, checks


def _run_bijectivity(cfg: RunConfig, rng):
    checks = []
    data = {}
    for r in range(1, cfg.r_max + 1):
        m = transform_matrix(cfg.lattice, r, cfg.rho, cfg.s, n=cfg.quad_n)
        sv = np.linalg.svd(m, compute_uv=False)
        ratio = float(sv.min() / sv.max())
        data[str(r)] = {"smin": float(sv.min()), "smax": float(sv.max()),
                        "condition": float(sv.max() / sv.min())}
        checks.append({"name": f"transform-nonsingular-r{r}", "sv_ratio": ratio,
                       "threshold": 1e-6, "pass": ratio > 1e-6})
    return {"singular_values": data}, checks


def _run_fj_roundtrip(cfg: RunConfig, rng):
    checks = []
    for side in (FJSide.Y, FJSide.X):
        series = random_series(cfg.lattice, side, cfg.r_max, rng)
        angles = random_points_centered(cfg.lattice, rng, 20)
        worst = 0.0
        for r, sec in series.terms.items():
            got = extract_coefficient(series.evaluate, r, angles, cfg.lattice, side)
            worst = max(worst, float(np.max(np.abs(got - sec(angles)))))
        checks.append({"name": f"roundtrip-{side.value}", "max_deviation": worst,
                       "tolerance": 1e-8, "pass": worst <= 1e-8})
        low = max(
            float(np.max(np.abs(extract_coefficient(
                series.evaluate, r, angles, cfg.lattice, side, check=False))))
            for r in (0, -1)
        )
        checks.append({"name": f"vanishing-nonpositive-{side.value}", "max_deviation": low,
                       "tolerance": 1e-10, "pass": low <= 1e-10})
    return {}, checks


def _run_theorem2(cfg: RunConfig, rng):
    checks = []
    reports = {}
    for side in (FJSide.Y, FJSide.X):
        series = random_series(cfg.lattice, side, cfg.r_max, rng)
        rep = coefficient_identity_report(series, cfg.r_max, cfg.tol,
                                          n=cfg.quad_n, rng=rng)
        reports[side.value] = rep
        checks.append({"name": f"coefficient-identity-{side.value}", "pass": rep["pass"]})
    return {"sides": reports}, checks


def _witness_flags():
    one, zero, i_gr = GR(1), GR(0), GR(0, 1)
    n3 = NilpotentElement(one, i_gr)
    p3 = (GR(2), one, one)
    flag_a = FlagP2(p3, line_through_exact(p3, n3.apply_point(p3)))
    n_plus = NilpotentElement(zero, BETA0_DEFAULT)
    flag_plus = FlagP2((GR(5), one, one), (zero, one, -one))
    n_minus = NilpotentElement(zero, -BETA0_DEFAULT)
    flag_minus = FlagP2((one, one, zero), (one, -one, GR(3)))
    return (n3, flag_a, OrbitCase.A), (n_plus, flag_plus, OrbitCase.B_PLUS), \
        (n_minus, flag_minus, OrbitCase.B_MINUS)


def line_through_exact(p, q):
    from .boundary import line_through

    return line_through(p, q)


def _run_orbit_classify(cfg: RunConfig, rng):
    checks = []
    table = []
    witnesses = _witness_flags()
    for n, flag, expected in witnesses:
        got = classify_orbit_case(n, flag)
        scale_p = GR(int(rng.integers(1, 5)), int(rng.integers(0, 3)))
        scale_l = GR(int(rng.integers(1, 5)))
        rescaled = classify_orbit_case(n, flag.rescaled(scale_p, scale_l))
        table.append({"expected": expected.value, "classified": got.value,
                      "rescaled": rescaled.value})
        checks.append({"name": f"classify-{expected.value}",
                       "pass": got is expected and rescaled is expected})
    n_plus, flag_plus, _ = witnesses[1]
    dual_case = classify_orbit_case(
        NilpotentElement(GR(0), -BETA0_DEFAULT), hermitian_dual_flag(flag_plus))
    checks.append({"name": "involution-swaps-b-cases",
                   "pass": dual_case is OrbitCase.B_MINUS})
    law_ok = True
    for _ in range(25):
        g1, g2 = random_heisenberg(rng), random_heisenberg(rng)
        state = ChartState(GR(0), GR(int(rng.integers(-2, 3)), int(rng.integers(-2, 3))),
                           GR(Fraction(1, int(rng.integers(7, 12)))))
        try:
            two = chart_action_bplus(g2, chart_action_bplus(g1, state))
            one = chart_action_bplus(g1 * g2, state)
        except CmThetaError:
            continue
        law_ok = law_ok and phases_equal(two.log_phase, one.log_phase) \
            and two.first == one.first and two.second == one.second
    checks.append({"name": "chart-group-law", "pass": law_ok})
    return {"witnesses": table}, checks


def _run_no2cone(cfg: RunConfig, rng):
    all_ok = True
    for _ in range(100):
        n1, n2 = random_commuting_pair(rng)
        rep = no_two_cone_check(n1, n2)
        all_ok = all_ok and rep["infeasible"]
    checks = [{"name": "no-two-cone-random", "trials": 100, "pass": all_ok}]
    return {}, checks


def _run_kernel_invariance(cfg: RunConfig, rng):
    checks = []
    for r in range(1, cfg.r_max + 1):
        be = _bundle(cfg, r, CurveTag.E)
        bp = _bundle(cfg, r, CurveTag.EPRIME)
        f = basis_section(be, int(rng.integers(0, be.mu)))
        fp = basis_section(bp, int(rng.integers(0, bp.mu)))
        z = complex(*rng.standard_normal(2) * 0.4)
        zp = complex(*rng.standard_normal(2) * 0.4)
        base = product_kernel(f, fp, z, zp)
        shifts = random_elements(cfg.lattice, rng, 10, span=2)
        worst = 0.0
        for al in shifts:
            moved = product_kernel(f, fp, z + np.conj(al), zp - al)
            worst = max(worst, abs(moved - base) / max(abs(base), 1e-300))
        checks.append({"name": f"kernel-invariance-r{r}", "max_deviation": worst,
                       "tolerance": 1e-9, "pass": worst <= 1e-9})
    return {}, checks


# ---------------------------------------------------------------------------
# driver


def run_subcommand(name: str, cfg: RunConfig) -> tuple[dict, bool]:
    rng = np.random.default_rng(cfg.seed)
    out_base = Path(cfg.out) if cfg.out else None
    if name == "theta-eval":
        body, checks = _run_theta_eval(cfg, rng)
    elif name == "basis":
        body, checks = _run_basis(cfg, rng)
    elif name == "gram":
        body, checks = _run_gram(cfg, rng, out_base)
    elif name == "eta-apply":
        body, checks = _run_eta_apply(cfg, rng, out_base)
    elif name == "duality-check":
        body, checks = _run_duality(cfg, rng)
    elif name == "bijectivity":
        body, checks = _run_bijectivity(cfg, rng)
    elif name == "fj-roundtrip":
        body, checks = _run_fj_roundtrip(cfg, rng)
    elif name == "theorem2-check":
        body, checks = _run_theorem2(cfg, rng)
    elif name == "orbit-classify":
        body, checks = _run_orbit_classify(cfg, rng)
    elif name == "no2cone":
        body, checks = _run_no2cone(cfg, rng)
    elif name == "kernel-invariance":
        body, checks = _run_kernel_invariance(cfg, rng)
    else:
        raise ConfigError(f"unknown subcommand {name!r}")
    passed = all(c["pass"] for c in checks)
    report = {
        "subcommand": name,
        "config": cfg.echo(),
        "checks": checks,
        "pass": passed,
    }
    report.update(body)
    return report, passed


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cmtheta",
        description="Verification pipelines for theta bases, transforms and boundary charts.",
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", default=None, help="key=value config file")
    parser.add_argument("--out", default=None, help="JSON report path")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--tol", type=float, default=None)
    parser.add_argument("--quad-n", type=int, default=None)
    parser.add_argument("--r-max", type=int, default=None)
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, {
            "out": args.out,
            "seed": args.seed,
            "tol": args.tol,
            "quad_n": args.quad_n,
            "r_max": args.r_max,
        })
        report, passed = run_subcommand(args.subcommand, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CmThetaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out_path = Path(cfg.out) if cfg.out else Path(f"{args.subcommand}-report.json")
    write_json(out_path, report)
    if not passed:
        first = next(c for c in report["checks"] if not c["pass"])
        print(f"check failed: {first['name']}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
