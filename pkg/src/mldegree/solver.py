"""Total-degree homotopy continuation for small square polynomial systems.

Paths are tracked in projective space: every equation is homogenized with an
extra coordinate ``X0`` and a random affine patch ``a . X = 1`` is appended,
so paths heading to infinity stay bounded and are recognised by ``X0 -> 0``.
All paths of a solve are advanced together as one numpy batch, each with its
own ``t`` and step size; results do not depend on batch composition.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .polyrat import COMPLEX, Polynomial

FINITE = "finite"
DIVERGED = "diverged"
FAILED = "failed"
SIMPLE = "simple"
CLUSTERED = "clustered"

_COND_LIMIT = 1e12
_ENDGAME_RATIO_MAX = 0.5  # cap on dt / t inside the endgame window
_RESCUE_COND = 1e8  # endpoints this well conditioned may be rescued by Newton at t = 0


@dataclass(frozen=True)
class TrackerConfig:
    """Path tracker settings.

    ``endgame_start`` opens the window near ``t = 0`` in which steps are
    taken relative to ``t`` and coordinate blow-up is monitored; tracking
    stops at ``t_final``.
    """

    step_min: float = 1e-7
    step_max: float = 0.1
    corrector_tol: float = 1e-10
    corrector_max_iters: int = 3
    endpoint_tol: float = 1e-12
    infinity_threshold: float = 1e10
    cluster_radius: float = 1e-6
    seed: int = 42
    endgame_start: float = 0.01
    t_final: float = 1e-12
    max_steps: int = 20000

    def __post_init__(self):
        if not 0 < self.step_min < self.step_max < 1:
            raise ValueError("need 0 < step_min < step_max < 1")
        for name in ("corrector_tol", "endpoint_tol", "infinity_threshold", "cluster_radius"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.cluster_radius > self.endpoint_tol:
            raise ValueError("cluster_radius must exceed endpoint_tol")
        if self.corrector_max_iters < 1:
            raise ValueError("corrector_max_iters must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not 0 < self.t_final < self.endgame_start < 1:
            raise ValueError("need 0 < t_final < endgame_start < 1")

    def with_seed(self, seed: int) -> "TrackerConfig":
        return replace(self, seed=seed)


class SquareSystem:
    """``n`` complex polynomial equations in ``n`` unknowns."""

    def __init__(self, equations: Sequence[Polynomial], variable_count: int | None = None):
        equations = [p.to_complex() for p in equations]
        if not equations:
            raise ValueError("empty system")
        n = equations[0].nvars if variable_count is None else variable_count
        if len(equations) != n:
            raise ValueError(f"system is not square: {len(equations)} equations, {n} unknowns")
        for p in equations:
            if p.nvars != n:
                raise ValueError("equations disagree on the number of unknowns")
            if p.is_zero():
                raise ValueError("identically zero equation")
        self.equations = equations
        self.variable_count = n
        self._evaluator = None

    @property
    def degrees(self) -> list[int]:
        return [p.degree() for p in self.equations]

    @property
    def bezout_count(self) -> int:
        return math.prod(self.degrees)

    @property
    def scale(self) -> float:
        """Largest coefficient modulus."""
        return max(p.max_coeff() for p in self.equations)

    @property
    def evaluator(self) -> "PolyEvaluator":
        if self._evaluator is None:
            self._evaluator = PolyEvaluator(self.equations)
        return self._evaluator

    def __call__(self, x) -> np.ndarray:
        f, _ = self.evaluator(np.asarray(x, dtype=complex)[None, :])
        return f[0]

    def residual(self, x) -> float:
        return float(scaled_residual(self, np.asarray(x, dtype=complex)[None, :])[0])


class PolyEvaluator:
    """Vectorised values and Jacobians of a list of polynomials.

    Call with an array of shape ``(B, nvars)``; returns ``(B, E)`` values and
    ``(B, E, nvars)`` Jacobians.
    """

    def __init__(self, polys: Sequence[Polynomial]):
        polys = [p.to_complex() for p in polys]
        nv = polys[0].nvars
        monos: dict[tuple, int] = {}

        def slot(e):
            return monos.setdefault(e, len(monos))

        entries_f = []
        entries_j = []
        for i, p in enumerate(polys):
            for e, c in p.terms.items():
                entries_f.append((i, slot(e), c))
                for k in range(nv):
                    if e[k]:
                        e2 = list(e)
                        e2[k] -= 1
                        entries_j.append((i, k, slot(tuple(e2)), c * e[k]))
        T = max(len(monos), 1)
        self.nvars = nv
        self.neqs = len(polys)
        self.exps = np.zeros((T, nv), dtype=np.intp)
        for e, s in monos.items():
            self.exps[s] = e
        self.maxdeg = int(self.exps.max()) if self.exps.size else 0
        cf = np.zeros((T, self.neqs), dtype=complex)
        for i, s, c in entries_f:
            cf[s, i] += c
        cj = np.zeros((T, self.neqs, nv), dtype=complex)
        for i, k, s, c in entries_j:
            cj[s, i, k] += c
        self.cf = cf
        self.cj = cj.reshape(T, self.neqs * nv)

    def monomials(self, X: np.ndarray) -> np.ndarray:
        B = X.shape[0]
        pw = np.ones((B, self.nvars, self.maxdeg + 1), dtype=complex)
        for d in range(1, self.maxdeg + 1):
            pw[:, :, d] = pw[:, :, d - 1] * X
        cols = np.arange(self.nvars)[None, :]
        return pw[:, cols, self.exps].prod(axis=2)  # (B, T)

    def __call__(self, X: np.ndarray):
        M = self.monomials(X)
        f = M @ self.cf
        j = (M @ self.cj).reshape(X.shape[0], self.neqs, self.nvars)
        return f, j


def scaled_residual(system: SquareSystem, X: np.ndarray) -> np.ndarray:
    """``max_i |f_i(x)| / max(1, sum_t |x^e_t|)`` over the monomials of ``f_i``.

    Dividing by the monomial magnitudes (not the coefficients) keeps the
    residual comparable with ``endpoint_tol * (1 + max |coefficient|)``.
    """
    ev = system.evaluator
    M = ev.monomials(X)
    f = M @ ev.cf
    mags = np.abs(M) @ (ev.cf != 0)
    return (np.abs(f) / np.maximum(1.0, mags)).max(axis=1)


def _homogenize(p: Polynomial, degree: int) -> Polynomial:
    terms = {}
    for e, c in p.terms.items():
        terms[(degree - sum(e),) + e] = c
    return Polynomial(p.nvars + 1, terms, COMPLEX)


class Homotopy:
    """``H(x, t) = gamma * t * start(x) + (1 - t) * target(x)``, projectivised.

    Unknowns are ``X = (X0, x1..xn)``; row ``n`` of ``H`` is the patch
    ``a . X - 1``.
    """

    def __init__(self, start: SquareSystem, target: SquareSystem, gamma: complex, patch: np.ndarray):
        if start.variable_count != target.variable_count:
            raise ValueError("start and target systems differ in size")
        if gamma == 0:
            raise ValueError("gamma must be nonzero")
        self.n = target.variable_count
        self.start = start
        self.target = target
        self.gamma = complex(gamma)
        self.patch = np.asarray(patch, dtype=complex)
        degs = [max(a, b, 0) for a, b in zip(start.degrees, target.degrees)]
        self.degrees = degs
        self._g = PolyEvaluator([_homogenize(p, d) for p, d in zip(start.equations, degs)])
        self._f = PolyEvaluator([_homogenize(p, d) for p, d in zip(target.equations, degs)])

    def lift(self, x: np.ndarray) -> np.ndarray:
        """Affine points ``(B, n)`` to patch-normalised projective points."""
        X = np.concatenate([np.ones((x.shape[0], 1), dtype=complex), x], axis=1)
        return X / (X @ self.patch)[:, None]

    def __call__(self, X: np.ndarray, t: np.ndarray):
        n = self.n
        f, jf = self._f(X)
        g, jg = self._g(X)
        gt = (self.gamma * t)[:, None]
        s = (1 - t)[:, None]
        B = X.shape[0]
        H = np.empty((B, n + 1), dtype=complex)
        H[:, :n] = gt * g + s * f
        H[:, n] = X @ self.patch - 1
        HX = np.empty((B, n + 1, n + 1), dtype=complex)
        HX[:, :n, :] = gt[:, :, None] * jg + s[:, :, None] * jf
        HX[:, n, :] = self.patch
        Ht = np.zeros((B, n + 1), dtype=complex)
        Ht[:, :n] = self.gamma * g - f
        return H, HX, Ht


@dataclass
class PathResult:
    status: str
    endpoint: np.ndarray | None
    final_residual: float
    steps_taken: int
    singular: bool = False
    condition: float = float("nan")
    start: np.ndarray | None = None
    rescued: bool = False


@dataclass
class NewtonResult:
    point: np.ndarray
    converged: bool
    residual: float
    iterations: int
    condition: float
    linear: bool = False

    @property
    def singular(self) -> bool:
        return self.linear or not self.condition < _COND_LIMIT


@dataclass
class Solution:
    point: np.ndarray
    multiplicity_flag: str
    paths: int = 1
    residual: float = 0.0
    singular: bool = False

    @property
    def simple(self) -> bool:
        return self.multiplicity_flag == SIMPLE and not self.singular


@dataclass
class SolutionSet:
    solutions: list[Solution]
    bezout_count: int
    path_results: dict[str, int]
    gamma: complex = 0j
    paths: list[PathResult] = field(default_factory=list, repr=False)

    @property
    def certified(self) -> bool:
        return self.path_results.get(FAILED, 0) == 0

    @property
    def points(self) -> list[np.ndarray]:
        return [s.point for s in self.solutions]

    def simple_points(self) -> list[np.ndarray]:
        return [s.point for s in self.solutions if s.simple]


# --------------------------------------------------------------------------


def total_degree_start(system: SquareSystem, gamma: complex = 1.0):
    """Start system ``x_i^{d_i} - 1`` and all of its roots.

    ``gamma`` enters the homotopy, not the start system; it is accepted here
    so a caller can validate it in one place.
    """
    if gamma == 0:
        raise ValueError("gamma must be nonzero")
    degs = system.degrees
    if min(degs) < 1:
        raise ValueError("an equation of degree 0 has no solutions; system rejected")
    n = system.variable_count
    eqs = []
    for i, d in enumerate(degs):
        e = [0] * n
        e[i] = d
        eqs.append(Polynomial(n, {tuple(e): 1, (0,) * n: -1}, COMPLEX))
    roots = [np.exp(2j * np.pi * np.arange(d) / d) for d in degs]
    points = [np.array(p, dtype=complex) for p in itertools.product(*roots)]
    return SquareSystem(eqs, n), points


def _solve_batch(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.linalg.solve(A, b[..., None])[..., 0]


def _norms(v: np.ndarray) -> np.ndarray:
    return np.abs(v).max(axis=-1)


def track_paths(starts: Sequence[np.ndarray], homotopy: Homotopy, cfg: TrackerConfig) -> list[PathResult]:
    """Track every start point from ``t = 1`` to ``t = 0``."""
    starts = np.array(starts, dtype=complex).reshape(len(starts), homotopy.n)
    B = starts.shape[0]
    if B == 0:
        return []
    X = homotopy.lift(starts)
    t = np.ones(B)
    h = np.full(B, cfg.step_max)
    streak = np.zeros(B, dtype=int)
    steps = np.zeros(B, dtype=int)
    active = np.ones(B, dtype=bool)
    stalled = np.zeros(B, dtype=bool)
    failed = np.zeros(B, dtype=bool)
    # decade checkpoints for valuation estimates of X0
    marks = [[] for _ in range(B)]
    next_mark = np.full(B, -2.0)  # log10 t of the next checkpoint
    tol = cfg.corrector_tol

    it = 0
    while active.any() and it < cfg.max_steps:
        it += 1
        idx = np.nonzero(active)[0]
        Xa, ta, ha = X[idx], t[idx], h[idx]
        in_end = ta <= cfg.endgame_start * (1 + 1e-12)
        dt = np.where(in_end, ha * ta, np.minimum(ha, ta - cfg.endgame_start))
        dt = np.where(in_end, np.minimum(dt, ta - cfg.t_final), dt)
        dt = np.maximum(dt, 0.0)
        t1 = ta - dt

        with np.errstate(all="ignore"):
            Xn = _rk4(homotopy, Xa, ta, -dt)
            ok = np.isfinite(Xn).all(axis=1)
            Xn = np.where(ok[:, None], Xn, Xa)
            conv = np.zeros(len(idx), dtype=bool)
            for _ in range(cfg.corrector_max_iters):
                H, HX, _ = homotopy(Xn, t1)
                try:
                    delta = _solve_batch(HX, H)
                except np.linalg.LinAlgError:
                    delta = np.stack([_safe_solve(a, b) for a, b in zip(HX, H)])
                Xn = Xn - delta
                good = np.isfinite(delta).all(axis=1)
                ok &= good
                Xn = np.where(good[:, None], Xn, Xa)
                conv |= ok & (_norms(delta) <= tol * (1 + _norms(Xn)))
                if conv[ok].all():
                    break
        accept = ok & conv
        # renormalise onto the patch after the corrector
        if accept.any():
            Xa_new = Xn[accept]
            X[idx[accept]] = Xa_new
            t[idx[accept]] = t1[accept]
            steps[idx[accept]] += 1
            streak[idx[accept]] += 1
            grow = idx[accept][streak[idx[accept]] >= 4]
            cap = np.where(t[grow] <= cfg.endgame_start * (1 + 1e-12), _ENDGAME_RATIO_MAX, cfg.step_max)
            h[grow] = np.minimum(h[grow] * 1.5, cap)
            streak[grow] = 0
        rej = idx[~accept]
        h[rej] *= 0.5
        streak[rej] = 0
        under = rej[h[rej] < cfg.step_min]
        if under.size:
            endgame = t[under] <= cfg.endgame_start * (1 + 1e-12)
            stalled[under[endgame]] = True
            failed[under[~endgame]] = True
            active[under] = False

        # checkpoints and termination
        for i in idx[accept]:
            lt = math.log10(t[i]) if t[i] > 0 else -math.inf
            if lt <= next_mark[i] + 1e-12:
                marks[i].append((lt, _x0_log(X[i])))
                next_mark[i] = math.floor(lt + 1e-12) - 1.0
            if _clearly_diverging(marks[i]):
                active[i] = False
        done = idx[accept][t[idx[accept]] <= cfg.t_final * (1 + 1e-9)]
        active[done] = False
    failed |= active  # ran out of iterations

    results = []
    for i in range(B):
        if failed[i]:
            results.append(PathResult(FAILED, None, float("inf"), int(steps[i]), start=starts[i]))
            continue
        results.append(_finish(homotopy, X[i], marks[i], int(steps[i]), cfg, starts[i]))
    return results


def _safe_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.solve(a, b)
    except np.linalg.LinAlgError:
        return np.full_like(b, np.nan)


def _velocity(homotopy: Homotopy, X: np.ndarray, t: np.ndarray) -> np.ndarray:
    _, HX, Ht = homotopy(X, t)
    try:
        return -_solve_batch(HX, Ht)
    except np.linalg.LinAlgError:
        return -np.stack([_safe_solve(a, b) for a, b in zip(HX, Ht)])


def _rk4(homotopy: Homotopy, X: np.ndarray, t: np.ndarray, dt: np.ndarray) -> np.ndarray:
    d = dt[:, None]
    k1 = _velocity(homotopy, X, t)
    k2 = _velocity(homotopy, X + 0.5 * d * k1, t + 0.5 * dt)
    k3 = _velocity(homotopy, X + 0.5 * d * k2, t + 0.5 * dt)
    k4 = _velocity(homotopy, X + d * k3, t + dt)
    return X + d * (k1 + 2 * k2 + 2 * k3 + k4) / 6


def _x0_log(X: np.ndarray) -> float:
    a = abs(X[0]) / max(np.abs(X).max(), 1e-300)
    return math.log10(a) if a > 0 else -math.inf


def _valuation(marks: list[tuple[float, float]]) -> float | None:
    """Slope of log|X0| against log t over the last two decades."""
    if len(marks) < 3:
        return None
    (t0, v0), (t1, v1) = marks[-3], marks[-1]
    if not math.isfinite(v1):
        return math.inf
    return (v1 - v0) / (t1 - t0)


def _clearly_diverging(marks) -> bool:
    """Three consecutive decade slopes agree on a valuation of at least 1/2."""
    if len(marks) < 4:
        return False
    slopes = [(b[1] - a[1]) / (b[0] - a[0]) for a, b in zip(marks[-4:-1], marks[-3:])]
    return min(slopes) > 0.5 and max(slopes) - min(slopes) < 0.05


def _finish(homotopy: Homotopy, X: np.ndarray, marks, steps: int, cfg: TrackerConfig, start) -> PathResult:
    target = homotopy.target
    x0 = X[0]
    big = np.abs(X[1:]).max()
    affine_norm = math.inf if x0 == 0 else big / abs(x0)
    if affine_norm > cfg.infinity_threshold:
        return PathResult(DIVERGED, None, float("nan"), steps, start=start)
    v = _valuation(marks)
    slow = v is not None and v > 0.05
    if slow and v > 0.25:
        return PathResult(DIVERGED, None, float("nan"), steps, start=start)
    x = X[1:] / x0
    limit = cfg.endpoint_tol * (1 + target.scale)
    nr = newton_refine(target, x, tol=0.0, max_iters=15 if slow else 60)
    cand = nr.point
    jump = _norms(cand - x) / (1 + _norms(x)) if np.isfinite(cand).all() else math.inf
    # A path still creeping at t_final, or whose endpoint sits a little off
    # the root, is kept only if Newton lands on a nearby well-conditioned root.
    rescue_ok = nr.residual <= limit and not nr.linear and nr.condition < _RESCUE_COND and jump < 0.1
    if slow:
        if rescue_ok:
            return PathResult(FINITE, cand, nr.residual, steps, False, nr.condition, start, rescued=True)
        return PathResult(DIVERGED, None, float("nan"), steps, start=start)
    if jump > 1e-3:
        if rescue_ok:
            return PathResult(FINITE, cand, nr.residual, steps, False, nr.condition, start, rescued=True)
        cand = x
        res = target.residual(cand)
    else:
        res = nr.residual
    if res <= limit:
        return PathResult(FINITE, cand, res, steps, nr.singular, nr.condition, start)
    return PathResult(FAILED, None, res, steps, nr.singular, nr.condition, start)


def track_path(start: Sequence[complex], homotopy: Homotopy, cfg: TrackerConfig) -> PathResult:
    return track_paths([np.asarray(start, dtype=complex)], homotopy, cfg)[0]


def newton_refine(system: SquareSystem, approx, tol: float, max_iters: int = 20) -> NewtonResult:
    """Newton's method on ``system`` from ``approx``.

    Stops once the scaled residual is at most ``tol``, when updates stop
    shrinking, or when the Jacobian condition estimate exceeds 1e12.  A run
    of update ratios near a constant in (0.2, 0.9) marks linear convergence,
    the signature of a multiple root.
    """
    x = np.array(approx, dtype=complex).reshape(system.variable_count)
    ev = system.evaluator
    prev = None
    ratios = []
    converged = False
    res = system.residual(x)
    best = (res, x.copy())
    k = 0
    for k in range(1, max_iters + 1):
        if res <= tol:
            converged = True
            k -= 1
            break
        f, j = ev(x[None, :])
        f, j = f[0], j[0]
        if not _condition(ev, x) < _COND_LIMIT:
            break
        delta = np.linalg.solve(j, f)
        x = x - delta
        res = system.residual(x)
        if res < best[0]:
            best = (res, x.copy())
        step = _norms(delta)
        # ratios of noise-level updates say nothing about the convergence rate
        if prev is not None and prev > 1e-9 * (1 + _norms(x)):
            ratios.append(step / prev)
        prev = step
        if step <= 4e-16 * (1 + _norms(x)):
            converged = True
            break
        if len(ratios) >= 4 and all(r > 0.95 for r in ratios[-4:]):
            break  # stalled
    else:
        converged = res <= tol
    linear = len(ratios) >= 3 and all(0.2 < r < 0.9 for r in ratios[-3:])
    res, x = best
    cond = _condition(ev, x)
    if tol > 0:
        converged = converged and res <= tol
    return NewtonResult(x, converged, res, k, cond, linear)


def _condition(ev: PolyEvaluator, x: np.ndarray) -> float:
    _, j = ev(x[None, :])
    if not np.isfinite(j).all():
        return math.inf
    sv = np.linalg.svd(j[0], compute_uv=False)
    return float(max(sv[0], 1.0) / sv[-1]) if sv[-1] > 0 else math.inf


def cluster_solutions(points: Sequence[np.ndarray], radius: float, system: SquareSystem | None = None):
    """Single-linkage clustering with strict ``distance < radius``.

    Returns ``(representative, members)`` pairs; the representative is the
    mean of the members, re-refined on ``system`` when one is given.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    pts = [np.atleast_1d(np.asarray(p, dtype=complex)) for p in points]
    n = len(pts)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if np.linalg.norm(pts[i] - pts[j]) < radius:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = []
    for members in groups.values():
        rep = np.mean([pts[i] for i in members], axis=0)
        if system is not None and len(members) > 1:
            nr = newton_refine(system, rep, tol=0.0, max_iters=60)
            if np.isfinite(nr.point).all() and np.linalg.norm(nr.point - rep) < radius:
                rep = nr.point
        out.append((rep, members))
    out.sort(key=lambda rm: _canonical_key(rm[0]))
    return out


def _drop_duplicate_rescues(results: list[PathResult], radius: float) -> None:
    """A rescued endpoint that repeats a regularly tracked one came from a diverging path."""
    regular = [r.endpoint for r in results if r.status == FINITE and not r.rescued]
    for r in results:
        if r.status == FINITE and r.rescued:
            if any(_norms(r.endpoint - p) < radius * (1 + _norms(p)) for p in regular):
                r.status, r.endpoint = DIVERGED, None


def _canonical_key(p: np.ndarray) -> tuple:
    return tuple(v for z in np.atleast_1d(p) for v in (float(z.real), float(z.imag)))


def solve_square(system: SquareSystem, cfg: TrackerConfig = TrackerConfig()) -> SolutionSet:
    """All isolated solutions of ``system`` via a gamma-trick total-degree homotopy."""
    rng = np.random.default_rng(cfg.seed)
    gamma = complex(np.exp(2j * np.pi * rng.uniform()))
    patch = rng.normal(size=system.variable_count + 1) + 1j * rng.normal(size=system.variable_count + 1)
    start_sys, starts = total_degree_start(system, gamma)
    hom = Homotopy(start_sys, system, gamma, patch)
    results = track_paths(starts, hom, cfg)
    _drop_duplicate_rescues(results, cfg.cluster_radius)
    counts = {FINITE: 0, DIVERGED: 0, FAILED: 0}
    for r in results:
        counts[r.status] += 1
    finite = [r for r in results if r.status == FINITE]
    clusters = cluster_solutions([r.endpoint for r in finite], cfg.cluster_radius, system)
    sols = []
    for rep, members in clusters:
        flag = CLUSTERED if len(members) > 1 else SIMPLE
        singular = any(finite[i].singular for i in members)
        if flag == SIMPLE and not singular:
            rep = finite[members[0]].endpoint
        sols.append(Solution(rep, flag, len(members), system.residual(rep), singular))
    return SolutionSet(sols, len(starts), counts, gamma, results)
