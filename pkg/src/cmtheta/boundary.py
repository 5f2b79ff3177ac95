"""Exact algebra of flags, nilpotents and boundary charts.

Everything here runs over Gaussian rationals: transversality and incidence
are exact identities, chart actions carry their unit-circle phases as exact
logarithms (theta-multipliers exp(2*pi*i*l) stored through l), and the
two-dimensional-cone obstruction is an exact elimination.  Only the
positivity test, which concerns open inequalities at large parameter, is
sampled in floating point.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np

from .errors import ChartSingularity, InputsProportional, NotCommuting
from .gaussian import GaussianRational, parse_gaussian

GR = GaussianRational
Triple = Tuple[GR, GR, GR]

P_INFINITY: Triple = (GR(1), GR(0), GR(0))
L_INFINITY: Triple = (GR(0), GR(0), GR(1))
BETA0_DEFAULT = GR(0, 1)


def _coerce_triple(values) -> Triple:
    t = tuple(GR.coerce(v) for v in values)
    if len(t) != 3:
        raise ValueError("projective coordinates need exactly 3 entries")
    if not any(t):
        raise ValueError("zero vector is not a projective point")
    return t


def proportional(a: Triple, b: Triple) -> bool:
    return (
        a[0] * b[1] == a[1] * b[0]
        and a[0] * b[2] == a[2] * b[0]
        and a[1] * b[2] == a[2] * b[1]
    )


def normalize(t: Triple) -> Triple:
    """Scale by the last nonzero coordinate."""
    for pivot in (t[2], t[1], t[0]):
        if pivot:
            return (t[0] / pivot, t[1] / pivot, t[2] / pivot)
    raise ValueError("zero vector")


def line_through(p: Triple, q: Triple) -> Triple:
    return (
        p[1] * q[2] - p[2] * q[1],
        p[2] * q[0] - p[0] * q[2],
        p[0] * q[1] - p[1] * q[0],
    )


def line_value(L: Triple, p: Triple) -> GR:
    return L[0] * p[0] + L[1] * p[1] + L[2] * p[2]


@dataclass(frozen=True)
class FlagP2:
    """Flag (p, L) in the projective plane with exact incidence L(p) = 0."""

    p: Triple
    L: Triple

    def __post_init__(self):
        object.__setattr__(self, "p", _coerce_triple(self.p))
        object.__setattr__(self, "L", _coerce_triple(self.L))
        if line_value(self.L, self.p):
            raise ValueError("flag violates incidence: L(p) != 0")

    def rescaled(self, cp: GR, cl: GR) -> "FlagP2":
        cp, cl = GR.coerce(cp), GR.coerce(cl)
        return FlagP2(tuple(cp * x for x in self.p), tuple(cl * x for x in self.L))

    def to_json(self) -> dict:
        return {"p": [str(x) for x in self.p], "L": [str(x) for x in self.L]}

    @classmethod
    def from_json(cls, data: dict) -> "FlagP2":
        return cls(
            tuple(parse_gaussian(x) for x in data["p"]),
            tuple(parse_gaussian(x) for x in data["L"]),
        )


@dataclass(frozen=True)
class NilpotentElement:
    """Strictly upper-triangular element with rows (0, a, b), (0, 0, conj a).

    Lie-algebra condition: b + conj(b) = 0.
    """

    alpha: GR
    beta: GR

    def __post_init__(self):
        object.__setattr__(self, "alpha", GR.coerce(self.alpha))
        object.__setattr__(self, "beta", GR.coerce(self.beta))
        if self.beta + self.beta.conjugate() != GR(0):
            raise ValueError("nilpotent requires beta + conj(beta) = 0")

    @property
    def order(self) -> int:
        if self.alpha:
            return 3
        return 2 if self.beta else 1

    def apply_point(self, p: Triple) -> Triple:
        x, y, t = p
        return (self.alpha * y + self.beta * t, self.alpha.conjugate() * t, GR(0))

    def exp_iy(self, y_val: float) -> np.ndarray:
        """Floating matrix exp(i*Y*N)."""
        a, b = complex(self.alpha), complex(self.beta)
        iy = 1j * y_val
        return np.array(
            [
                [1.0, iy * a, -(y_val**2) * a * a.conjugate() / 2.0 + iy * b],
                [0.0, 1.0, iy * a.conjugate()],
                [0.0, 0.0, 1.0],
            ]
        )

    def to_json(self) -> dict:
        return {"alpha": str(self.alpha), "beta": str(self.beta)}

    @classmethod
    def from_json(cls, data: dict) -> "NilpotentElement":
        return cls(parse_gaussian(data["alpha"]), parse_gaussian(data["beta"]))


@dataclass(frozen=True)
class HeisenbergElement:
    """Unipotent group element (alpha, beta) with beta + conj(beta) = alpha*conj(alpha)."""

    alpha: GR
    beta: GR

    def __post_init__(self):
        object.__setattr__(self, "alpha", GR.coerce(self.alpha))
        object.__setattr__(self, "beta", GR.coerce(self.beta))
        if self.beta + self.beta.conjugate() != self.alpha * self.alpha.conjugate():
            raise ValueError("Heisenberg relation beta + conj(beta) = |alpha|^2 fails")

    def __mul__(self, other: "HeisenbergElement") -> "HeisenbergElement":
        return HeisenbergElement(
            self.alpha + other.alpha,
            self.beta + other.beta + self.alpha * other.alpha.conjugate(),
        )

    def inverse(self) -> "HeisenbergElement":
        return HeisenbergElement(-self.alpha, self.beta.conjugate())

    def matrix(self) -> Tuple[Triple, Triple, Triple]:
        a, b = self.alpha, self.beta
        return (
            (GR(1), a, b),
            (GR(0), GR(1), a.conjugate()),
            (GR(0), GR(0), GR(1)),
        )

    def inverse_matrix(self) -> Tuple[Triple, Triple, Triple]:
        return self.inverse().matrix()


def apply_to_flag(g: HeisenbergElement, flag: FlagP2) -> FlagP2:
    """Exact action: p -> M p, L -> L M^{-1} (incidence is preserved)."""
    m = g.matrix()
    minv = g.inverse_matrix()
    p = tuple(sum((m[i][j] * flag.p[j] for j in range(3)), GR(0)) for i in range(3))
    L = tuple(sum((flag.L[i] * minv[i][j] for i in range(3)), GR(0)) for j in range(3))
    return FlagP2(p, L)


# ---------------------------------------------------------------------------
# orbit conditions


def transversality(n: NilpotentElement, flag: FlagP2) -> bool:
    """Exact test L(N p) = 0."""
    return not line_value(flag.L, n.apply_point(flag.p))


def _open_conditions(p, L) -> bool:
    x, y, t = p
    u, v, w = L
    point_side = abs(y) ** 2 - 2.0 * (x * t.conjugate()).real
    line_side = abs(v) ** 2 - 2.0 * (w * u.conjugate()).real
    return point_side > 0.0 and line_side > 0.0


def positivity(n: NilpotentElement, flag: FlagP2,
               samples=(10.0, 100.0, 1000.0)) -> bool:
    """Sampled check that exp(i*Y*N) moves the flag into the open domain.

    The two conditions are quadratic in Y with explicit leading terms, so
    three increasing scales distinguish every sign pattern arising here.
    """
    p0 = np.array([complex(c) for c in flag.p])
    l0 = np.array([complex(c) for c in flag.L])
    for y_val in samples:
        m = n.exp_iy(y_val)
        minv = n.exp_iy(-y_val)
        if not _open_conditions(m @ p0, l0 @ minv):
            return False
    return True


class OrbitCase(enum.Enum):
    A = "a"
    B_PLUS = "b_plus"
    B_MINUS = "b_minus"
    NONE = "none"


def classify_orbit_case(n: NilpotentElement, flag: FlagP2,
                        beta0: GR = BETA0_DEFAULT,
                        samples=(10.0, 100.0, 1000.0)) -> OrbitCase:
    """Case of the boundary orbit through the flag, or NONE.

    Order-3 nilpotents give case a when transversality and positivity hold.
    Order-2 nilpotents are +/-beta0 up to a positive rational and give case
    b+ (line through the infinite point, point finite on it) or case b-
    (point on the infinite line, line finite through it).
    """
    if n.order == 3:
        if transversality(n, flag) and positivity(n, flag, samples):
            return OrbitCase.A
        return OrbitCase.NONE
    if n.order < 2:
        return OrbitCase.NONE
    ratio = n.beta / beta0
    if not ratio.is_real() or not ratio:
        raise ValueError("order-2 nilpotent must be a nonzero rational multiple of beta0")
    if not transversality(n, flag) or not positivity(n, flag, samples):
        return OrbitCase.NONE
    p, L = flag.p, flag.L
    if ratio.re > 0:
        good = (
            L[0] == GR(0)
            and L[1] != GR(0)
            and not proportional(p, P_INFINITY)
        )
        return OrbitCase.B_PLUS if good else OrbitCase.NONE
    good = (
        p[2] == GR(0)
        and p[1] != GR(0)
        and not proportional(L, L_INFINITY)
    )
    return OrbitCase.B_MINUS if good else OrbitCase.NONE


def hermitian_dual_flag(flag: FlagP2) -> FlagP2:
    """Anti-holomorphic involution induced by the invariant Hermitian form.

    Exchanges the two open conditions, hence the b+ and b- data.
    """
    x, y, t = flag.p
    u, v, w = flag.L
    dual_point = (-w.conjugate(), v.conjugate(), -u.conjugate())
    dual_line = (-t.conjugate(), y.conjugate(), -x.conjugate())
    return FlagP2(dual_point, dual_line)


# ---------------------------------------------------------------------------
# chart actions (exact phase bookkeeping)


@dataclass(frozen=True)
class ChartState:
    """Chart coordinates with the theta-multiplier kept as an exact logarithm.

    The accumulated multiplier is exp(2*pi*i*log_phase); log_phase lives in
    the Gaussian rationals, and two phases agree exactly when their
    difference is a rational integer.
    """

    log_phase: GR
    first: GR
    second: GR


def phases_equal(l1: GR, l2: GR) -> bool:
    return (l1 - l2).is_integer()


def chart_action_bplus(g: HeisenbergElement, state: ChartState,
                       beta0: GR = BETA0_DEFAULT) -> ChartState:
    """(theta, y, u) -> (exp(2 pi i (a y + b)/beta0) theta, y + conj a, u/(1 - a u))."""
    a, b = g.alpha, g.beta
    denom = GR(1) - a * state.second
    if not denom:
        raise ChartSingularity("1 - alpha*u vanishes")
    return ChartState(
        state.log_phase + (a * state.first + b) / beta0,
        state.first + a.conjugate(),
        state.second / denom,
    )


def chart_action_bminus(g: HeisenbergElement, state: ChartState,
                        beta0: GR = BETA0_DEFAULT) -> ChartState:
    """(theta, x, t) -> (exp(2 pi i (conj(a) x + conj(b))/beta0) theta, x + a, t/(1 + conj(a) t))."""
    a, b = g.alpha, g.beta
    denom = GR(1) + a.conjugate() * state.second
    if not denom:
        raise ChartSingularity("1 + conj(alpha)*t vanishes")
    return ChartState(
        state.log_phase + (a.conjugate() * state.first + b.conjugate()) / beta0,
        state.first + a,
        state.second / denom,
    )


def chart_action_bplus_numeric(g: HeisenbergElement, state, beta0: complex = 1j):
    """Floating variant acting on a plain (theta, y, u) triple."""
    theta, y, u = (complex(c) for c in state)
    a, b = complex(g.alpha), complex(g.beta)
    denom = 1.0 - a * u
    if abs(denom) < 1e-15:
        raise ChartSingularity("1 - alpha*u vanishes")
    phase = np.exp(2j * np.pi * (a * y + b) / beta0)
    return (phase * theta, y + a.conjugate(), u / denom)


def chart_action_bminus_numeric(g: HeisenbergElement, state, beta0: complex = 1j):
    theta, x, t = (complex(c) for c in state)
    a, b = complex(g.alpha), complex(g.beta)
    denom = 1.0 + a.conjugate() * t
    if abs(denom) < 1e-15:
        raise ChartSingularity("1 + conj(alpha)*t vanishes")
    phase = np.exp(2j * np.pi * (a.conjugate() * x + b.conjugate()) / beta0)
    return (phase * theta, x + a, t / denom)


def bplus_action_via_flag(g: HeisenbergElement, y: GR, u: GR,
                          beta0: GR = BETA0_DEFAULT) -> ChartState:
    """Chart action recomputed from the raw matrix action on the slice flag.

    Starts from the slice flag p = (0, y, 1), L = (u, 1, -y), applies the
    group matrix, then restores the slice by the one-parameter normalization
    whose phase is the exp(2*pi*i*l) multiplier.  Must reproduce the closed
    form of chart_action_bplus.
    """
    y, u = GR.coerce(y), GR.coerce(u)
    flag = FlagP2((GR(0), y, GR(1)), (u, GR(1), -y))
    moved = apply_to_flag(g, flag)
    x1, y1, t1 = moved.p
    if not t1:
        raise ChartSingularity("flag left the affine slice")
    lam = (x1 / t1) / beta0
    # exp(-lam * N_+) with N_+ = beta0 * E_13 subtracts lam*beta0*t from x
    p2 = (x1 - lam * beta0 * t1, y1, t1)
    l2 = (moved.L[0], moved.L[1], lam * beta0 * moved.L[0] + moved.L[2])
    if not l2[1]:
        raise ChartSingularity("slice line coordinate vanished")
    if p2[0] or (l2[2] / l2[1]) + (p2[1] / p2[2]) != GR(0):
        raise ArithmeticError("slice normalization failed")
    return ChartState(lam, p2[1] / p2[2], l2[0] / l2[1])


def case_a_stabilizer_action(g: HeisenbergElement, x: GR, v: GR) -> ChartState:
    """Case-a slice action of a stabilizer element (alpha integer, real).

    Computed through the raw matrix action on p = (x, 0, 1), L = (1, v, -x)
    followed by the slice normalization; the closed form is
    (theta, x, v) -> (theta, x + Im(beta)*i, v) with a full-turn phase.
    """
    if not g.alpha.is_integer():
        raise ValueError("case-a stabilizer needs integer alpha")
    x, v = GR.coerce(x), GR.coerce(v)
    flag = FlagP2((x, GR(0), GR(1)), (GR(1), v, -x))
    moved = apply_to_flag(g, flag)
    lam = moved.p[1] / moved.p[2]
    # exp(-lam * N_a) with N_a = E_12 + E_23
    x1, y1, t1 = moved.p
    p2 = (x1 - lam * y1 + lam * lam / 2 * t1, y1 - lam * t1, t1)
    u1, v1, w1 = moved.L
    l2 = (u1, lam * u1 + v1, lam * lam / 2 * u1 + lam * v1 + w1)
    if p2[1] or not p2[2] or not l2[0]:
        raise ArithmeticError("case-a slice normalization failed")
    return ChartState(lam, p2[0] / p2[2], l2[1] / l2[0])


def domain_membership_bplus(state, beta0: complex = 1j) -> bool:
    """Interior test log|theta| > pi (1 + 2 Re(conj(y) u))/(i beta0 |u|^2).

    i*beta0 is a negative real, so the bound is negative for small Re(conj(y)u);
    theta = 0 belongs only with u = 0 (the boundary slice itself).
    """
    theta, y, u = (complex(c) for c in state)
    if theta == 0:
        return u == 0
    if u == 0:
        return True
    i_beta0 = (1j * beta0).real
    bound = np.pi * (1.0 + 2.0 * (y.conjugate() * u).real) / (i_beta0 * abs(u) ** 2)
    return bool(np.log(abs(theta)) > bound)


def tube_domain_membership(log_theta_re: float, log_u_re: float,
                           beta0: complex = 1j) -> bool:
    """Membership in logarithmic coordinates on the y = 0 transverse slice.

    With Theta = log(theta), U = log(u) the interior condition becomes
    Re(Theta) > (pi/(i beta0)) exp(-2 Re(U)): a tube domain over a concave
    open subset of the real plane (i*beta0 is a negative real).
    """
    i_beta0 = (1j * complex(beta0)).real
    return bool(log_theta_re > (np.pi / i_beta0) * np.exp(-2.0 * log_u_re))


# ---------------------------------------------------------------------------
# the two-dimensional cone obstruction


def no_two_cone_check(n1: NilpotentElement, n2: NilpotentElement) -> dict:
    """Exact infeasibility certificate for a common boundary orbit.

    For commuting, non-proportional n1, n2 a common orbit flag would force
    (conj(a2) b1 - conj(a1) b2) t^2 = 0 with t != 0, while exact elimination
    from commutation and non-proportionality makes that coefficient nonzero.
    """
    v1 = (n1.alpha, n1.beta)
    v2 = (n2.alpha, n2.beta)
    if not any(v1) or not any(v2):
        raise InputsProportional("zero nilpotent is proportional to everything")
    if v1[0] * v2[1] == v1[1] * v2[0]:
        raise InputsProportional("nilpotent pair is proportional")
    commutator = n1.alpha * n2.alpha.conjugate() - n1.alpha.conjugate() * n2.alpha
    if commutator:
        raise NotCommuting("nilpotents do not commute")
    witness = n2.alpha.conjugate() * n1.beta - n1.alpha.conjugate() * n2.beta
    return {
        "commuting": True,
        "proportional": False,
        "constraint_coefficient": str(witness),
        "infeasible": bool(witness),
        "detail": "a common orbit flag needs t != 0 and "
                  "(conj(a2) b1 - conj(a1) b2) t^2 = 0; the coefficient is nonzero",
    }


# ---------------------------------------------------------------------------
# random exact data (used by the verification pipelines)


def random_heisenberg(rng, span: int = 3) -> HeisenbergElement:
    """Random element over the default lattice (1+i)Z[i] with integral beta."""
    m = int(rng.integers(-span, span + 1))
    n = int(rng.integers(-span, span + 1))
    k = int(rng.integers(-span, span + 1))
    alpha = GR(1, 1) * GR(m, n)
    beta = GR(alpha.norm() / 2) + GR(0, k)
    return HeisenbergElement(alpha, beta)


def random_commuting_pair(rng, span: int = 4):
    """Commuting, non-proportional nilpotent pair (alpha2 a real multiple of alpha1)."""
    while True:
        a_re = Fraction(int(rng.integers(-span, span + 1)), int(rng.integers(1, span + 1)))
        a_im = Fraction(int(rng.integers(-span, span + 1)), int(rng.integers(1, span + 1)))
        alpha1 = GR(a_re, a_im)
        if not alpha1:
            continue
        c = Fraction(int(rng.integers(-span, span + 1)), int(rng.integers(1, span + 1)))
        if c == 0:
            continue
        alpha2 = GR(c) * alpha1
        beta1 = GR(0, Fraction(int(rng.integers(-span, span + 1)), int(rng.integers(1, span + 1))))
        beta2 = GR(0, Fraction(int(rng.integers(-span, span + 1)), int(rng.integers(1, span + 1))))
        n1 = NilpotentElement(alpha1, beta1)
        n2 = NilpotentElement(alpha2, beta2)
        if n1.alpha * n2.beta == n2.alpha * n1.beta:
            continue
        return n1, n2
