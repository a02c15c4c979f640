"""The surfaces V_m: images of the smooth surface U under a monomial map.

``U = {p1 + p3 = p2 + p4 = 1}`` in ``(C*)^4`` is parametrized by
``(x, y) -> (x, y, 1-x, 1-y)``.  The map ``pi_m`` sends ``p`` to
``(p1^m, p1/p2, p1*p3, p1*p4)``; for odd ``m`` the image ``U_m`` has
``(m-1)/2`` transverse two-branch singular points.  ``V_m`` is ``U_m``
minus the hyperplane ``sum p = 1``, embedded in ``(C*)^5`` by appending
``1 - sum p``.

:func:`verify_family` computes the likelihood degree of ``V_m``, its Euler
characteristic (through the curve ``C_m = U_m`` intersected with the
hyperplane, pulled back to ``U``), the intersection-cohomology Euler
characteristic, and checks the relations between them.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .likelihood import (
    IMPLICIT,
    PARAMETRIZED,
    MLReport,
    TorusModel,
    ml_degree,
)
from .polyrat import COMPLEX, Polynomial, RationalFunction, univariate_gcd, variables
from .solver import SquareSystem, TrackerConfig, solve_square

PARAM_NAMES = ["x", "y"]


class ParityError(ValueError):
    """The construction is only defined for odd ``m``."""


def _check_odd(m: int) -> None:
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    if m % 2 == 0:
        raise ParityError(f"m must be odd, got {m}")


@dataclass(frozen=True)
class FamilyParams:
    m: int

    def __post_init__(self):
        _check_odd(self.m)

    @property
    def xi(self) -> complex:
        return cmath.exp(2j * math.pi / self.m)

    @property
    def num_sing(self) -> int:
        return (self.m - 1) // 2


@dataclass(frozen=True)
class MonomialMap:
    """Torus homomorphism ``p -> (prod_j p_j^A[i, j])_i``."""

    exponent_matrix: tuple[tuple[int, ...], ...]

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.exponent_matrix, dtype=int)

    def determinant(self) -> int:
        return integer_det(self.exponent_matrix)

    def __call__(self, point):
        """Apply to a torus point (numbers) or to rational functions."""
        out = []
        for row in self.exponent_matrix:
            acc = 1
            for p, k in zip(point, row):
                if k:
                    acc = acc * p**k
            out.append(acc)
        return out


def integer_det(rows) -> int:
    """Exact determinant by fraction-free Gaussian elimination (Bareiss)."""
    a = [list(map(int, r)) for r in rows]
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("matrix must be square")
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def monomial_matrix(m: int) -> MonomialMap:
    if not isinstance(m, int) or m < 1:
        raise ValueError("m must be a positive integer")
    return MonomialMap(((m, 0, 0, 0), (1, -1, 0, 0), (1, 0, 1, 0), (1, 0, 0, 1)))


def _u_coords() -> list[RationalFunction]:
    x, y = variables(2)
    return [RationalFunction(p) for p in (x, y, 1 - x, 1 - y)]


def build_U(form: str = IMPLICIT) -> TorusModel:
    """The surface ``p1 + p3 = p2 + p4 = 1`` in ``(C*)^4``."""
    if form == IMPLICIT:
        p1, p2, p3, p4 = variables(4)
        return TorusModel(4, IMPLICIT, implicit=[p1 + p3 - 1, p2 + p4 - 1], name="U")
    if form == PARAMETRIZED:
        return TorusModel(4, PARAMETRIZED, params=list(PARAM_NAMES), coords=_u_coords(), name="U")
    raise ValueError(f"unknown form {form!r}")


def um_coords(m: int) -> list[RationalFunction]:
    """``pi_m`` composed with the parametrization of ``U``."""
    return monomial_matrix(m)(_u_coords())


def vm_coords(m: int) -> list[RationalFunction]:
    q = um_coords(m)
    last = RationalFunction(Polynomial.constant(1, 2)) - sum(q[1:], q[0])
    return q + [last]


def singular_points(params: FamilyParams) -> list[np.ndarray]:
    """The ``(m-1)/2`` singular points of ``U_m`` (closed form in ``xi``)."""
    m, xi = params.m, params.xi
    pts = []
    for i in range(1, params.num_sing + 1):
        w = xi**i
        a = 1 / (1 + w) ** m
        b = w / (1 + w) ** 2
        pts.append(np.array([a, 1, b, b], dtype=complex))
    return pts


def fiber_points(m: int, target, cfg: TrackerConfig = TrackerConfig()) -> list[np.ndarray]:
    """Points ``(x, y)`` of the parametrizing surface mapping to ``target``.

    Solves the square subsystem ``x(1-x) = s3, x = s2*y`` and keeps the
    solutions that also satisfy ``x^m = s1`` and ``x(1-y) = s4`` and lie in
    ``U`` (``x, y`` not 0 or 1).
    """
    s1, s2, s3, s4 = (complex(v) for v in target)
    x, y = variables(2, COMPLEX)
    sol = solve_square(SquareSystem([x * (1 - x) - s3, x - s2 * y]), cfg)
    out = []
    for p in sol.points:
        a, b = p
        scale = 1 + max(abs(s1), abs(s4))
        if abs(a**m - s1) > 1e-8 * scale or abs(a * (1 - b) - s4) > 1e-8 * scale:
            continue
        if min(abs(a), abs(b), abs(1 - a), abs(1 - b)) < 1e-12:
            continue
        out.append(np.array(p, dtype=complex))
    return out


def singular_preimages(params: FamilyParams, cfg: TrackerConfig = TrackerConfig()) -> list[np.ndarray]:
    pts = []
    for s in singular_points(params):
        pts.extend(fiber_points(params.m, s, cfg))
    return pts


def _x_poly(coeffs_ascending) -> Polynomial:
    return Polynomial(1, {(k,): c for k, c in enumerate(coeffs_ascending)})


def off_H_polynomials(m: int) -> tuple[Polynomial, Polynomial]:
    """``2x(1+x)^(m-2) + 1`` and ``1 + x + ... + x^(m-1)`` over the rationals."""
    (x,) = variables(1)
    return 2 * x * (1 + x) ** (m - 2) + 1, _x_poly([Fraction(1)] * m)


def off_H_certificate(m: int) -> bool:
    """No singular point of ``U_m`` lies on ``p1 + p2 + p3 + p4 = 1``.

    Exact part: the two polynomials of :func:`off_H_polynomials` are coprime,
    so no ``xi^i`` can make the coordinate sum 1.  Numeric part: each
    singular point's coordinate sum is at distance > 1e-9 from 1.
    """
    _check_odd(m)
    if m < 3:
        raise ValueError("the certificate is stated for m >= 3")
    a, b = off_H_polynomials(m)
    exact = univariate_gcd(a, b) == Polynomial.constant(1, 1)
    numeric = all(abs(p.sum() - 1) > 1e-9 for p in singular_points(FamilyParams(m)))
    return exact and numeric


def curve_equation(m: int) -> Polynomial:
    """``h_m = y * (x^m + x/y + x(1-x) + x(1-y) - 1)``, a polynomial in ``x, y``."""
    _check_odd(m)
    x, y = variables(2)
    return x**m * y + x + x * (1 - x) * y + x * (1 - y) * y - y


def build_Vm_param(params: FamilyParams, cfg: TrackerConfig = TrackerConfig()) -> TorusModel:
    return TorusModel(
        5,
        PARAMETRIZED,
        params=list(PARAM_NAMES),
        coords=vm_coords(params.m),
        excluded_points=singular_preimages(params, cfg),
        name=f"V_{params.m}",
    )


def build_Cm_model(params: FamilyParams) -> TorusModel:
    """The curve ``h_m = 0`` inside ``U``, coordinates ``(x, y, 1-x, 1-y)``."""
    return TorusModel(
        4,
        PARAMETRIZED,
        params=list(PARAM_NAMES),
        coords=_u_coords(),
        constraints=[curve_equation(params.m)],
        name=f"C'_{params.m}",
    )


@dataclass
class SmoothnessProbe:
    smooth: bool
    singular_candidates: list[np.ndarray]
    solved: tuple[int, int]


def smoothness_probe(h: Polynomial, cfg: TrackerConfig = TrackerConfig()) -> SmoothnessProbe:
    """Look for singular points of the plane curve ``h = 0`` inside ``U``.

    Solves ``{h, h_x}`` and ``{h, h_y}`` separately and intersects the
    solution sets within ``cluster_radius``; a common point with
    ``x, y`` not in ``{0, 1}`` is a singular point of the curve.
    """
    hx, hy = h.diff(0), h.diff(1)
    if hx.is_zero() or hy.is_zero():
        raise ValueError("probe needs a curve depending on both variables")
    s1 = solve_square(SquareSystem([h, hx]), cfg)
    s2 = solve_square(SquareSystem([h, hy]), cfg)
    if not (s1.certified and s2.certified):
        raise RuntimeError("smoothness probe solve had failed paths")
    common = []
    for p in s1.points:
        if any(np.linalg.norm(p - q) < cfg.cluster_radius for q in s2.points):
            x, y = p
            if min(abs(x), abs(y), abs(1 - x), abs(1 - y)) > cfg.cluster_radius:
                common.append(p)
    return SmoothnessProbe(not common, common, (len(s1.points), len(s2.points)))


def chi_Um(m: int) -> int:
    _check_odd(m)
    return (3 - m) // 2


def chi_IC_transverse(chi: int, num_sing: int) -> int:
    """IC Euler characteristic when every singularity is a transverse two-branch point."""
    return chi + num_sing


@dataclass
class ChiVm:
    chi_Vm: int
    chi_Cm: int
    curve_report: MLReport
    probe: SmoothnessProbe


def chi_Vm(params: FamilyParams, cfg: TrackerConfig = TrackerConfig(), draws: int = 5) -> ChiVm:
    """``chi(V_m) = chi(U_m) - chi(C_m)`` with ``chi(C_m) = -MLdeg(C'_m)``."""
    probe = smoothness_probe(curve_equation(params.m), cfg)
    if not probe.smooth:
        raise RuntimeError(f"curve C'_{params.m} failed the smoothness probe")
    rep = ml_degree(build_Cm_model(params), cfg, draws)
    if not rep.certified:
        raise RuntimeError(f"MLdeg(C'_{params.m}) not certified: {rep.per_draw_counts}")
    chi_c = -rep.count
    return ChiVm(chi_Um(params.m) - chi_c, chi_c, rep, probe)


def fiber_structure(params: FamilyParams, cfg: TrackerConfig = TrackerConfig(), samples: int = 5) -> dict:
    """Fiber sizes of ``U -> U_m`` over singular points and random regular points."""
    rng = np.random.default_rng([cfg.seed, params.m, 11])
    pi = monomial_matrix(params.m)
    sing = [len(fiber_points(params.m, s, cfg)) for s in singular_points(params)]
    regular = []
    for _ in range(samples):
        x, y = rng.normal(size=2) + 1j * rng.normal(size=2)
        regular.append(len(fiber_points(params.m, pi([x, y, 1 - x, 1 - y]), cfg)))
    return {"singular": sing, "regular": regular}


@dataclass
class FamilyReport:
    m: int
    num_sing: int
    singular_points: list[list[complex]]
    off_H_certified: bool
    mldeg_Vm: int
    chi_Um: int
    chi_Cm: int
    chi_Vm: int
    chi_IC_Vm: int
    gap: int
    bound_holds: bool
    ic_equality: bool
    conjecture_violated: bool
    huh_equality_V1: bool | None
    curve_smooth: bool
    fiber_sizes: dict
    certified: bool
    checks: dict[str, bool] = field(default_factory=dict)
    mldeg_report: MLReport | None = None
    curve_report: MLReport | None = None

    @property
    def ok(self) -> bool:
        return self.certified and all(self.checks.values())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["singular_points"] = [[[z.real, z.imag] for z in p] for p in self.singular_points]
        d["mldeg_report"] = self.mldeg_report.to_dict() if self.mldeg_report else None
        d["curve_report"] = self.curve_report.to_dict() if self.curve_report else None
        d["ok"] = self.ok
        return d


def verify_family(m: int, cfg: TrackerConfig = TrackerConfig(), draws: int = 5) -> FamilyReport:
    """Run the whole pipeline for ``V_m`` and check the relations among the results."""
    params = FamilyParams(m)
    sing = singular_points(params)
    off_h = off_H_certificate(m) if m >= 3 else True
    fibers = fiber_structure(params, cfg)

    vm = build_Vm_param(params, cfg)
    rep = ml_degree(vm, cfg, draws)
    chi = chi_Vm(params, cfg, draws)
    mldeg = rep.count
    chi_ic = chi_IC_transverse(chi.chi_Vm, params.num_sing)
    gap = mldeg - chi.chi_Vm
    bound = chi_ic >= mldeg  # dimension 2, so the sign (-1)^d is +1
    checks = {
        "singular_point_count": len(sing) == params.num_sing,
        "excluded_preimages": len(vm.excluded_points) == 2 * params.num_sing,
        "fibers_over_singular_points": all(k == 2 for k in fibers["singular"]),
        "fibers_over_regular_points": all(k == 1 for k in fibers["regular"]),
        "off_H": off_h,
        "curve_smooth": chi.probe.smooth,
        "gap_formula": gap == params.num_sing,
        "ic_bound": bound,
        "ic_equality": chi_ic == mldeg,
    }
    if m >= 3:
        checks["conjecture_violated"] = chi.chi_Vm < mldeg
    huh = None
    if m == 1:
        huh = mldeg == chi.chi_Vm
        checks["huh_equality_V1"] = huh
    return FamilyReport(
        m=m,
        num_sing=params.num_sing,
        singular_points=[list(p) for p in sing],
        off_H_certified=off_h,
        mldeg_Vm=mldeg,
        chi_Um=chi_Um(m),
        chi_Cm=chi.chi_Cm,
        chi_Vm=chi.chi_Vm,
        chi_IC_Vm=chi_ic,
        gap=gap,
        bound_holds=bound,
        ic_equality=chi_ic == mldeg,
        conjecture_violated=chi.chi_Vm < mldeg,
        huh_equality_V1=huh,
        curve_smooth=chi.probe.smooth,
        fiber_sizes=fibers,
        certified=rep.certified and chi.curve_report.certified,
        checks=checks,
        mldeg_report=rep,
        curve_report=chi.curve_report,
    )
