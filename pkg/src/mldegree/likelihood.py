"""Likelihood critical systems of very affine varieties and their counts.

A model is a closed subvariety of the torus ``(C*)^n``, given either as a
complete intersection ``f_1 = ... = f_k = 0`` in the coordinates ``p_i`` or
by a rational parametrization ``q_1..q_n`` of ``s`` parameters cut by ``c``
constraints.  For data ``lambda`` the critical points are where
``sum_i lambda_i dq_i / q_i`` vanishes on the model; Lagrange multipliers
handle the equations.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .polyrat import (
    COMPLEX,
    EXACT,
    Polynomial,
    RationalFunction,
    clear_denominators,
    log_derivative,
    parse_polynomial,
    parse_rational,
)
from .solver import SquareSystem, TrackerConfig, newton_refine, solve_square

IMPLICIT = "implicit"
PARAMETRIZED = "parametrized"

# a critical point this close to an excluded fiber means the data was not generic
EXCLUSION_RADIUS = 1e-6
TORUS_BOUNDS = (1e-10, 1e10)


class ModelError(ValueError):
    """A model violates its structural invariants."""


class NotCertifiedError(RuntimeError):
    def __init__(self, message: str, report: "MLReport | None" = None):
        super().__init__(message)
        self.report = report


@dataclass
class DataVector:
    lam: np.ndarray
    seed: int

    def __post_init__(self):
        self.lam = np.asarray(self.lam, dtype=complex)
        if np.any(self.lam == 0):
            raise ValueError("data entries must be nonzero")


@dataclass
class TorusModel:
    """A very affine variety in ``(C*)^n``.

    ``implicit`` holds exact polynomials in ``p1..pn``.  For parametrized
    models ``coords`` are exact rational functions of ``params`` and
    ``constraints`` exact polynomials in ``params``; ``excluded_points`` are
    parameter values whose fibers must be avoided.
    """

    n: int
    form: str
    implicit: list[Polynomial] = field(default_factory=list)
    params: list[str] = field(default_factory=list)
    coords: list[RationalFunction] = field(default_factory=list)
    constraints: list[Polynomial] = field(default_factory=list)
    excluded_points: list[np.ndarray] = field(default_factory=list)
    name: str = ""
    coord_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.form == IMPLICIT:
            if any(f.nvars != self.n for f in self.implicit):
                raise ModelError("implicit equations must live in n variables")
            if not self.implicit:
                raise ModelError("implicit model needs at least one equation")
            if self.dimension < 0:
                raise ModelError("more equations than coordinates")
            if any(f.domain != EXACT for f in self.implicit):
                raise ModelError("model equations must have exact coefficients")
        elif self.form == PARAMETRIZED:
            s = len(self.params)
            if len(self.coords) != self.n:
                raise ModelError(f"expected {self.n} coordinates, got {len(self.coords)}")
            for q in self.coords:
                if q.nvars != s:
                    raise ModelError("coordinates must be functions of the parameters")
                if q.is_zero():
                    raise ModelError("a coordinate function is identically zero")
            if any(g.nvars != s for g in self.constraints):
                raise ModelError("constraints must be polynomials in the parameters")
            if self.dimension < 0:
                raise ModelError("more constraints than parameters")
            self.excluded_points = [np.asarray(p, dtype=complex) for p in self.excluded_points]
            for p in self.excluded_points:
                if p.shape != (s,):
                    raise ModelError("excluded points must be parameter vectors")
        else:
            raise ModelError(f"unknown model form {self.form!r}")
        if not self.coord_names:
            self.coord_names = [f"p{i + 1}" for i in range(self.n)]

    @property
    def dimension(self) -> int:
        if self.form == IMPLICIT:
            return self.n - len(self.implicit)
        return len(self.params) - len(self.constraints)

    def torus_point(self, params: Sequence[complex]) -> np.ndarray:
        """Torus coordinates of a parameter point (identity for implicit models)."""
        if self.form == IMPLICIT:
            return np.asarray(params, dtype=complex)[: self.n]
        z = [complex(v) for v in params[: len(self.params)]]
        return np.array([q.to_complex()(z) for q in self.coords], dtype=complex)


@dataclass
class CriticalSystem:
    system: SquareSystem
    unknown_names: list[str]
    spurious_factors: list[Polynomial]
    model: TorusModel
    data: DataVector
    multiplier_chart: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def multipliers(self, point) -> np.ndarray:
        """Lagrange multipliers of a solution (``inf`` on the chart's pole)."""
        k = self.system.variable_count - self.nparams
        v = np.asarray(point, dtype=complex)[self.nparams:self.nparams + k]
        if self.model.form == IMPLICIT:
            return v
        with np.errstate(divide="ignore", invalid="ignore"):
            return v / (1 - self.multiplier_chart * v)

    @property
    def nparams(self) -> int:
        if self.model.form == IMPLICIT:
            return self.model.n
        return len(self.model.params)


@dataclass
class MLReport:
    count: int
    draws: int
    per_draw_counts: list[int]
    certified: bool
    solutions_sample: list[np.ndarray]
    bezout_counts: list[int] = field(default_factory=list)
    path_results: list[dict] = field(default_factory=list)
    data_seeds: list[int] = field(default_factory=list)
    tracker_seeds: list[int] = field(default_factory=list)
    redraws: int = 0
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "certified": self.certified,
            "draws": self.draws,
            "per_draw_counts": self.per_draw_counts,
            "bezout_counts": self.bezout_counts,
            "path_results": self.path_results,
            "data_seeds": self.data_seeds,
            "tracker_seeds": self.tracker_seeds,
            "redraws": self.redraws,
            "notes": self.notes,
            "solutions_sample": [[[z.real, z.imag] for z in p] for p in self.solutions_sample],
        }


# --------------------------------------------------------------------------


def sample_generic_data(n: int, seed: int) -> DataVector:
    """Random data with moduli in [0.5, 2] and uniform angles."""
    rng = np.random.default_rng(seed)
    r = rng.uniform(0.5, 2.0, size=n)
    theta = rng.uniform(0.0, 2 * np.pi, size=n)
    return DataVector(r * np.exp(1j * theta), seed)


def assemble_implicit(model: TorusModel, data: DataVector) -> CriticalSystem:
    """``lambda_i = sum_j mu_j p_i df_j/dp_i`` together with ``f_j = 0``."""
    if model.form != IMPLICIT:
        raise ModelError("assemble_implicit needs an implicit model")
    n, k = model.n, len(model.implicit)
    if k != n - model.dimension:
        raise ModelError("implicit model is not a complete intersection of codimension k")
    N = n + k
    fs = [f.to_complex().extend(N) for f in model.implicit]
    p = [Polynomial.variable(i, N, COMPLEX) for i in range(n)]
    mu = [Polynomial.variable(n + j, N, COMPLEX) for j in range(k)]
    eqs = []
    for i in range(n):
        e = Polynomial.constant(complex(data.lam[i]), N, COMPLEX)
        for j in range(k):
            e = e - mu[j] * p[i] * fs[j].diff(i)
        eqs.append(e)
    eqs.extend(fs)
    names = list(model.coord_names) + [f"mu{j + 1}" for j in range(k)]
    return CriticalSystem(SquareSystem(eqs), names, p, model, data)


def assemble_parametrized(model: TorusModel, data: DataVector) -> CriticalSystem:
    """Pull the likelihood 1-form back along the parametrization.

    For each parameter ``t``: ``sum_i lambda_i (dq_i/dt)/q_i - sum_j mu_j dg_j/dt``
    with denominators cleared, plus the constraints ``g_j = 0``.
    """
    if model.form != PARAMETRIZED:
        raise ModelError("assemble_parametrized needs a parametrized model")
    s, c = len(model.params), len(model.constraints)
    N = s + c
    _check_coordinates_on_locus(model)

    coords = [
        RationalFunction(q.numerator.to_complex().extend(N), q.denominator.to_complex().extend(N))
        for q in model.coords
    ]
    gs = [g.to_complex().extend(N) for g in model.constraints]
    # multiplier mu_j = nu_j / (1 - a_j nu_j): large multipliers stay bounded
    chart = multiplier_chart(data.seed, c)
    nu = [Polynomial.variable(s + j, N, COMPLEX) for j in range(c)]
    denom = [1 - complex(a) * v for a, v in zip(chart, nu)]
    eqs = []
    spurious: list[Polynomial] = []
    for a in range(s):
        summands = []
        for lam, q in zip(data.lam, coords):
            for term in log_derivative(q, a):
                summands.append(term * complex(lam))
        for j in range(c):
            d = gs[j].diff(a)
            if not d.is_zero():
                summands.append(RationalFunction(-(nu[j] * d), denom[j]))
        cleared = clear_denominators(summands)
        eqs.append(cleared.numerator)
        for f in cleared.spurious_factors:
            if not any(f.scalar_ratio(g) is not None for g in spurious):
                spurious.append(f)
    eqs.extend(gs)
    for q in coords:
        for part in (q.numerator, q.denominator):
            if not part.is_constant() and not any(part.scalar_ratio(g) is not None for g in spurious):
                spurious.append(part)
    for d in denom:
        if not any(d.scalar_ratio(g) is not None for g in spurious):
            spurious.append(d)
    names = list(model.params) + [f"nu{j + 1}" for j in range(c)]
    return CriticalSystem(SquareSystem(eqs), names, spurious, model, data, chart)


def _locus_samples(model: TorusModel) -> list[list[complex]]:
    """Points of the constraint locus: cut it down to dimension 0 by random affine hyperplanes."""
    s = len(model.params)
    rng = np.random.default_rng(0)
    if not model.constraints:
        return [list(rng.normal(size=s) + 1j * rng.normal(size=s))]
    eqs = [g.to_complex() for g in model.constraints]
    for _ in range(model.dimension):
        a = rng.normal(size=s + 1) + 1j * rng.normal(size=s + 1)
        terms = {tuple(int(i == k) for i in range(s)): complex(a[k]) for k in range(s)}
        terms[(0,) * s] = complex(a[s])
        eqs.append(Polynomial(s, terms, COMPLEX))
    try:
        sol = solve_square(SquareSystem(eqs), TrackerConfig(seed=0))
    except ValueError as exc:
        raise ModelError(f"constraints do not cut out a locus of dimension {model.dimension}: {exc}") from None
    return [list(p) for p in sol.points]


def _check_coordinates_on_locus(model: TorusModel) -> None:
    samples = _locus_samples(model)
    if not samples:
        raise ModelError("the constraint locus appears to be empty")
    for i, q in enumerate(model.coords):
        num = q.numerator.to_complex()
        scale = max(1.0, num.max_coeff())
        if all(abs(num(z)) <= 1e-9 * scale * (1 + max(abs(v) for v in z)) ** max(num.degree(), 0)
               for z in samples):
            raise ModelError(f"coordinate {i + 1} vanishes on the constraint locus")


def multiplier_chart(seed: int, c: int) -> np.ndarray:
    """Unit-modulus coefficients of the multiplier charts, derived from ``seed``."""
    rng = np.random.default_rng([seed, 7])
    return np.exp(2j * np.pi * rng.uniform(size=c))


def assemble(model: TorusModel, data: DataVector) -> CriticalSystem:
    if model.form == IMPLICIT:
        return assemble_implicit(model, data)
    return assemble_parametrized(model, data)


def _sub_seed(*key: int) -> int:
    return int(np.random.SeedSequence(list(key)).generate_state(1, np.uint64)[0])


@dataclass
class _DrawOutcome:
    ok: bool
    points: list[np.ndarray]
    torus: list[np.ndarray]
    reason: str = ""
    bezout: int = 0
    paths: dict = field(default_factory=dict)


def critical_points(crit: CriticalSystem, cfg: TrackerConfig) -> _DrawOutcome:
    """Solve a critical system and keep the genuine torus critical points."""
    sol = solve_square(crit.system, cfg)
    out = _DrawOutcome(False, [], [], bezout=sol.bezout_count, paths=dict(sol.path_results))
    if not sol.certified:
        out.reason = "failed paths"
        return out
    model = crit.model
    lo, hi = TORUS_BOUNDS
    spur = [f.to_complex() for f in crit.spurious_factors]
    rad = cfg.cluster_radius
    keep, torus = [], []
    for s in sol.solutions:
        x = s.point
        vals = [abs(f(list(x))) for f in spur]
        if any(v < rad for v in vals):
            continue
        if not s.simple and any(v < math.sqrt(rad) for v in vals):
            continue
        try:
            z = model.torus_point(x)
        except ZeroDivisionError:
            continue
        mods = np.abs(z)
        if not ((mods > lo) & (mods < hi)).all():
            nr = newton_refine(crit.system, x, tol=0.0, max_iters=10)
            try:
                z = model.torus_point(nr.point)
            except ZeroDivisionError:
                continue
            mods = np.abs(z)
            if not ((mods > lo) & (mods < hi)).all():
                continue
            x = nr.point
        if not s.simple:
            out.reason = "non-simple critical point (data not generic)"
            return out
        params = x[: crit.nparams]
        for e in model.excluded_points:
            if np.linalg.norm(params - e) < EXCLUSION_RADIUS:
                out.reason = "critical point on an excluded fiber"
                return out
        keep.append(x)
        torus.append(z)
    out.ok = True
    out.points = keep
    out.torus = torus
    return out


def ml_degree(model: TorusModel, cfg: TrackerConfig = TrackerConfig(), draws: int = 5,
              max_redraws: int = 10) -> MLReport:
    """Count likelihood critical points for ``draws`` independent data vectors.

    A draw whose solve has failed paths, non-simple surviving points, or a
    point on an excluded fiber is repeated with fresh data and a fresh
    homotopy, at most ``max_redraws`` times in total.
    """
    if draws < 1:
        raise ValueError("draws must be at least 1")
    counts, bez, paths, dseeds, tseeds, notes = [], [], [], [], [], []
    redraws = 0
    sample: list[np.ndarray] = []
    certified = True
    for k in range(draws):
        attempt = 0
        while True:
            dseed = _sub_seed(cfg.seed, k, attempt, 1)
            tseed = _sub_seed(cfg.seed, k, attempt, 2)
            data = sample_generic_data(model.n, dseed)
            crit = assemble(model, data)
            res = critical_points(crit, cfg.with_seed(tseed))
            if res.ok:
                break
            notes.append(f"draw {k} attempt {attempt}: {res.reason}")
            redraws += 1
            attempt += 1
            if redraws > max_redraws:
                break
        dseeds.append(dseed)
        tseeds.append(tseed)
        bez.append(res.bezout)
        paths.append(res.paths)
        if not res.ok:
            certified = False
            break
        counts.append(len(res.points))
        sample = res.torus
    if len(set(counts)) > 1:
        certified = False
    count = Counter(counts).most_common(1)[0][0] if counts else -1
    return MLReport(count, draws, counts, certified, sample, bez, paths, dseeds, tseeds, redraws, notes)


def euler_char_smooth(model: TorusModel, d: int | None = None, cfg: TrackerConfig = TrackerConfig(),
                      draws: int = 5) -> int:
    """Signed Euler characteristic of a *smooth* closed subvariety of the torus.

    Uses ``(-1)^d chi(X) = MLdeg(X)``, valid only when ``X`` is smooth;
    checking smoothness is the caller's job.
    """
    d = model.dimension if d is None else d
    rep = ml_degree(model, cfg, draws)
    if not rep.certified:
        raise NotCertifiedError("maximum likelihood degree not certified", rep)
    return (-1) ** d * rep.count


# --------------------------------------------------------------------------
# model files


def _complex_pair(v) -> complex:
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def model_from_dict(spec: dict) -> TorusModel:
    try:
        n = int(spec["n"])
        form = spec["form"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"model needs integer 'n' and 'form': {exc}") from None
    names = spec.get("coord_names") or [f"p{i + 1}" for i in range(n)]
    if form == IMPLICIT:
        eqs = [parse_polynomial(e, names) for e in spec.get("equations", [])]
        return TorusModel(n, IMPLICIT, implicit=eqs, name=spec.get("name", ""), coord_names=names)
    if form == PARAMETRIZED:
        params = list(spec.get("params", []))
        if not params:
            raise ModelError("parametrized model needs 'params'")
        coords = [parse_rational(c, params) for c in spec.get("coords", [])]
        cons = [parse_polynomial(g, params) for g in spec.get("constraints", [])]
        excl = [[_complex_pair(v) for v in p] for p in spec.get("excluded_points", [])]
        return TorusModel(n, PARAMETRIZED, params=params, coords=coords, constraints=cons,
                          excluded_points=excl, name=spec.get("name", ""), coord_names=names)
    raise ModelError(f"unknown model form {form!r}")


def load_model(path: str | Path) -> TorusModel:
    with open(path) as fh:
        return model_from_dict(json.load(fh))


def model_to_dict(model: TorusModel) -> dict:
    if model.form == IMPLICIT:
        return {"n": model.n, "form": IMPLICIT, "name": model.name,
                "equations": [f.format(model.coord_names) for f in model.implicit]}
    return {
        "n": model.n,
        "form": PARAMETRIZED,
        "name": model.name,
        "params": list(model.params),
        "coords": [q.format(model.params) for q in model.coords],
        "constraints": [g.format(model.params) for g in model.constraints],
        "excluded_points": [[[z.real, z.imag] for z in p] for p in model.excluded_points],
    }


def hyperplane_model(n: int) -> TorusModel:
    """``p_1 + ... + p_n = 1`` inside ``(C*)^n``."""
    ps = [Polynomial.variable(i, n) for i in range(n)]
    return TorusModel(n, IMPLICIT, implicit=[sum(ps, Polynomial.zero(n)) - 1], name=f"H{n}")
