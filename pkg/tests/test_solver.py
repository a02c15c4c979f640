import numpy as np
import pytest

from mldegree.family import FamilyParams, build_Vm_param
from mldegree.likelihood import assemble, sample_generic_data
from mldegree.polyrat import COMPLEX, Polynomial, variables
from mldegree.solver import (
    CLUSTERED,
    DIVERGED,
    FINITE,
    SIMPLE,
    Homotopy,
    SquareSystem,
    TrackerConfig,
    cluster_solutions,
    newton_refine,
    scaled_residual,
    solve_square,
    total_degree_start,
    track_path,
    track_paths,
)
from oracle import multistart_newton

X, Y = variables(2, COMPLEX)
(T,) = variables(1, COMPLEX)
CFG = TrackerConfig()


def random_dense_system(degrees, seed):
    rng = np.random.default_rng(seed)
    n = len(degrees)
    eqs = []
    for d in degrees:
        terms = {}
        for e in np.ndindex(*([d + 1] * n)):
            if sum(e) <= d:
                terms[tuple(int(k) for k in e)] = complex(rng.normal(), rng.normal())
        eqs.append(Polynomial(n, terms, COMPLEX))
    return SquareSystem(eqs)


def homotopy_for(start_eqs, target_eqs, gamma=np.exp(0.4j), seed=3):
    rng = np.random.default_rng(seed)
    n = len(target_eqs)
    patch = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
    return Homotopy(SquareSystem(start_eqs), SquareSystem(target_eqs), gamma, patch)


# ---------------------------------------------------------------- config and systems


def test_default_tracker_config():
    c = TrackerConfig()
    assert (c.step_min, c.step_max, c.corrector_tol, c.corrector_max_iters) == (1e-7, 0.1, 1e-10, 3)
    assert (c.endpoint_tol, c.infinity_threshold, c.cluster_radius, c.seed) == (1e-12, 1e10, 1e-6, 42)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"step_min": 0.2, "step_max": 0.1},
        {"step_max": 1.5},
        {"corrector_tol": 0},
        {"cluster_radius": 1e-13},
        {"seed": -1},
        {"seed": 2**64},
        {"corrector_max_iters": 0},
        {"t_final": 0.5},
    ],
)
def test_invalid_tracker_config(kwargs):
    with pytest.raises(ValueError):
        TrackerConfig(**kwargs)


def test_square_system_invariants():
    with pytest.raises(ValueError):
        SquareSystem([X + Y])
    with pytest.raises(ValueError):
        SquareSystem([X, Polynomial.zero(2, COMPLEX)])
    s = SquareSystem([X**2 + Y - 1, Y**2 - 3])
    assert s.degrees == [2, 2] and s.bezout_count == 4


def test_total_degree_start_points():
    system = SquareSystem([X**2 + Y - 1, Y**2 - 3])
    start, pts = total_degree_start(system, gamma=1.0)
    assert len(pts) == 4
    for p in pts:
        assert np.allclose(np.abs(p), 1) and np.allclose(p**2, 1)
        assert max(abs(v) for v in start(p)) < 1e-14
    _, pts = total_degree_start(SquareSystem([T - 5]))
    assert len(pts) == 1 and np.allclose(pts[0], [1])


def test_total_degree_start_rejects_constant_equation():
    with pytest.raises(ValueError):
        total_degree_start(SquareSystem([X, Polynomial.constant(2, 2, COMPLEX)]))


# ---------------------------------------------------------------- tracking


def test_track_single_root_branch():
    h = homotopy_for([T**2 - 1], [T**2 - 4])
    r = track_path([1.0], h, CFG)
    assert r.status == FINITE
    assert abs(r.endpoint[0] - 2) < 1e-10
    assert r.final_residual <= CFG.endpoint_tol * 2
    assert r.steps_taken > 0


def test_track_escaping_root_diverges():
    h = homotopy_for([T - 1], [Polynomial.constant(1, 1, COMPLEX)])
    r = track_path([1.0], h, CFG)
    assert r.status == DIVERGED and r.endpoint is None


def test_track_all_paths_to_square_roots_of_two():
    h = homotopy_for([X**2 - 1, Y**2 - 1], [X**2 - 2, Y**2 - 2])
    starts = [np.array([a, b], dtype=complex) for a in (1, -1) for b in (1, -1)]
    results = track_paths(starts, h, CFG)
    ends = sorted((round(r.endpoint[0].real, 9), round(r.endpoint[1].real, 9)) for r in results)
    s = round(np.sqrt(2), 9)
    assert all(r.status == FINITE for r in results)
    assert ends == sorted((a * s, b * s) for a in (1, -1) for b in (1, -1))


def test_step_underflow_is_reported_as_failure():
    cfg = TrackerConfig(step_min=0.09, step_max=0.1, corrector_max_iters=1, corrector_tol=1e-15)
    system = random_dense_system([3, 3], seed=4)
    sol = solve_square(system, cfg)
    assert sum(sol.path_results.values()) == 9
    assert sol.path_results["failed"] > 0 and not sol.certified


# ---------------------------------------------------------------- newton


def test_newton_square_root_of_two():
    res = newton_refine(SquareSystem([T**2 - 2]), [1.4], tol=1e-10)
    assert res.converged and abs(res.point[0] - np.sqrt(2)) < 1e-12


def test_newton_on_double_root_is_flagged():
    res = newton_refine(SquareSystem([T**2]), [0.1], tol=1e-14)
    assert res.linear or not res.converged
    assert res.singular


def test_newton_recovers_family_critical_point():
    crit = assemble(build_Vm_param(FamilyParams(3)), sample_generic_data(5, 11))
    sol = solve_square(crit.system, CFG)
    x = max(sol.simple_points(), key=lambda p: abs(p[0]))
    rng = np.random.default_rng(0)
    noisy = x + 1e-4 * (rng.normal(size=x.shape) + 1j * rng.normal(size=x.shape))
    res = newton_refine(crit.system, noisy, tol=1e-14)
    assert res.converged and np.abs(res.point - x).max() < 1e-12


# ---------------------------------------------------------------- solve / cluster


def test_solve_product_system():
    sol = solve_square(SquareSystem([X**2 - 1, Y**2 - 1]), CFG)
    assert len(sol.solutions) == 4
    assert all(s.multiplicity_flag == SIMPLE and s.simple for s in sol.solutions)
    assert sol.certified and sol.bezout_count == 4


def test_solve_double_root_is_clustered():
    sol = solve_square(SquareSystem([(X - 1) ** 2, Y - 1]), CFG)
    assert len(sol.solutions) == 1
    s = sol.solutions[0]
    assert s.multiplicity_flag == CLUSTERED and s.paths == 2
    assert np.allclose(s.point, [1, 1], atol=1e-6)


def test_solve_linear_likelihood_equation():
    p = T
    sol = solve_square(SquareSystem([2 * (1 - p) - 3 * p]), CFG)
    assert len(sol.solutions) == 1 and abs(sol.solutions[0].point[0] - 0.4) < 1e-14


def test_cluster_examples():
    pts = [np.array([1.0]), np.array([1.0 + 1e-9]), np.array([5.0])]
    out = cluster_solutions(pts, 1e-6)
    assert len(out) == 2
    assert abs(out[0][0][0] - 1) < 1e-8 and out[1][0][0] == 5
    assert cluster_solutions([], 1e-6) == []
    edge = cluster_solutions([np.array([0.0]), np.array([0.5])], 0.5)
    assert len(edge) == 2
    with pytest.raises(ValueError):
        cluster_solutions(pts, 0)


@pytest.mark.parametrize("seed", range(4))
def test_solution_set_invariants(seed):
    system = random_dense_system([2, 3], seed)
    cfg = TrackerConfig(seed=seed)
    sol = solve_square(system, cfg)
    assert sum(sol.path_results.values()) == sol.bezout_count == 6
    limit = cfg.endpoint_tol * (1 + system.scale)
    for s in sol.solutions:
        if s.simple:
            assert float(scaled_residual(system, np.array([s.point]))[0]) <= limit
    pts = sol.points
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            assert np.linalg.norm(pts[i] - pts[j]) > cfg.cluster_radius
    keys = [tuple(v for z in p for v in (z.real, z.imag)) for p in pts]
    assert keys == sorted(keys)


def test_determinism():
    system = random_dense_system([3, 2], 9)
    a, b = solve_square(system, TrackerConfig(seed=5)), solve_square(system, TrackerConfig(seed=5))
    assert a.path_results == b.path_results
    assert all(np.array_equal(p, q) for p, q in zip(a.points, b.points))


def test_gamma_independence():
    system = random_dense_system([2, 2, 2], 21)
    counts = {len(solve_square(system, TrackerConfig(seed=s)).simple_points()) for s in (1, 2, 3)}
    assert counts == {8}


# ---------------------------------------------------------------- oracle


def _match(a_pts, b_pts, tol):
    return all(min(np.abs(p - q).max() for q in b_pts) < tol for p in a_pts)


@pytest.mark.parametrize("degrees,seed", [([2, 2], 0), ([3, 3], 1), ([4, 4], 2), ([2, 2, 2], 3), ([4, 2], 4),
                                          ([2, 2, 2, 2], 5)])
def test_oracle_equivalence_dense(degrees, seed):
    system = random_dense_system(degrees, seed)
    assert system.bezout_count <= 16
    sol = solve_square(system, TrackerConfig(seed=seed))
    ours = sol.simple_points()
    oracle = multistart_newton(system.equations, starts=10_000, radius=10.0, seed=seed)
    assert len(ours) == system.bezout_count
    assert _match(oracle, ours, 1e-8)
    inside = [p for p in ours if np.abs(p).max() < 5]
    assert _match(inside, oracle, 1e-8)
