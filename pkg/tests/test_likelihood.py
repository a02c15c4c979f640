import json

import numpy as np
import pytest

from mldegree.family import FamilyParams, build_Cm_model, build_U, build_Vm_param
from mldegree.likelihood import (
    IMPLICIT,
    PARAMETRIZED,
    TORUS_BOUNDS,
    DataVector,
    ModelError,
    NotCertifiedError,
    TorusModel,
    assemble,
    assemble_implicit,
    assemble_parametrized,
    critical_points,
    euler_char_smooth,
    hyperplane_model,
    load_model,
    ml_degree,
    model_from_dict,
    model_to_dict,
    sample_generic_data,
)
from mldegree.polyrat import COMPLEX, Polynomial, ParseError, RationalFunction, variables
from mldegree.solver import TrackerConfig, solve_square

CFG = TrackerConfig()
LINE = {"n": 2, "form": "implicit", "equations": ["p1 + p2 - 1"]}
LINE_PARAM = {"n": 2, "form": "parametrized", "params": ["x"], "coords": ["x", "1 - x"]}


# ---------------------------------------------------------------- data


def test_sample_generic_data_is_reproducible_and_in_range():
    a, b = sample_generic_data(2, 1), sample_generic_data(2, 1)
    assert np.array_equal(a.lam, b.lam) and np.all(a.lam != 0)
    c, d = sample_generic_data(5, 7), sample_generic_data(5, 8)
    assert not np.array_equal(c.lam, d.lam)
    mods = np.abs(sample_generic_data(1000, 3).lam)
    assert mods.min() >= 0.5 and mods.max() <= 2


def test_data_vector_rejects_zero():
    with pytest.raises(ValueError):
        DataVector(np.array([1, 0]), 0)


# ---------------------------------------------------------------- models


def test_model_invariants():
    p1, p2 = variables(2)
    with pytest.raises(ModelError):
        TorusModel(2, IMPLICIT, implicit=[])
    with pytest.raises(ModelError):
        TorusModel(1, IMPLICIT, implicit=[p1 + p2 - 1])
    (x,) = variables(1)
    with pytest.raises(ModelError):
        TorusModel(2, PARAMETRIZED, params=["x"], coords=[RationalFunction(x)])
    with pytest.raises(ModelError):
        TorusModel(1, PARAMETRIZED, params=["x"], coords=[RationalFunction(x - x)])
    with pytest.raises(ModelError):
        TorusModel(1, "other")
    m = TorusModel(2, IMPLICIT, implicit=[p1 + p2 - 1])
    assert m.dimension == 1 and m.coord_names == ["p1", "p2"]


# ---------------------------------------------------------------- assembly


def test_assemble_line_implicit_structure():
    data = DataVector(np.array([2.0, 3.0]), 0)
    crit = assemble_implicit(model_from_dict(LINE), data)
    p1, p2, mu = variables(3, COMPLEX)
    expected = [2 - mu * p1, 3 - mu * p2, p1 + p2 - 1]
    assert crit.system.equations == expected
    assert crit.unknown_names == ["p1", "p2", "mu1"]


def test_assemble_hyperplane_h5():
    data = sample_generic_data(5, 2)
    crit = assemble_implicit(hyperplane_model(5), data)
    ps = variables(6, COMPLEX)
    mu = ps[5]
    for i in range(5):
        assert crit.system.equations[i] == complex(data.lam[i]) - mu * ps[i]
    assert crit.system.equations[5] == sum(ps[:5], Polynomial.zero(6, COMPLEX)) - 1


def test_assemble_u_has_six_equations():
    crit = assemble(build_U(IMPLICIT), sample_generic_data(4, 1))
    assert crit.system.variable_count == 6
    assert crit.unknown_names == ["p1", "p2", "p3", "p4", "mu1", "mu2"]


def test_assemble_implicit_rejects_wrong_form():
    with pytest.raises(ModelError):
        assemble_implicit(model_from_dict(LINE_PARAM), sample_generic_data(2, 0))
    with pytest.raises(ModelError):
        assemble_parametrized(model_from_dict(LINE), sample_generic_data(2, 0))


def test_assemble_line_parametrized():
    data = DataVector(np.array([2.0, 3.0]), 0)
    crit = assemble_parametrized(model_from_dict(LINE_PARAM), data)
    (x,) = variables(1, COMPLEX)
    assert crit.system.equations == [2 * (1 - x) - 3 * x]
    sol = solve_square(crit.system, CFG)
    assert len(sol.points) == 1 and abs(sol.points[0][0] - 0.4) < 1e-14


def test_assemble_vm_and_cm_shapes():
    crit = assemble(build_Vm_param(FamilyParams(3)), sample_generic_data(5, 0))
    assert crit.system.variable_count == 2 and crit.unknown_names == ["x", "y"]
    crit = assemble(build_Cm_model(FamilyParams(3)), sample_generic_data(4, 0))
    assert crit.system.variable_count == 3 and crit.unknown_names == ["x", "y", "nu1"]


def test_assemble_vm_bezout_regression():
    crit = assemble(build_Vm_param(FamilyParams(3)), sample_generic_data(5, 0))
    degs = crit.system.degrees
    assert crit.system.bezout_count == degs[0] * degs[1] == 25


def test_coordinate_vanishing_on_constraint_locus_is_rejected():
    spec = {"n": 3, "form": "parametrized", "params": ["x", "y"], "coords": ["x", "y", "x - y"],
            "constraints": ["x - y"]}
    with pytest.raises(ModelError):
        assemble(model_from_dict(spec), sample_generic_data(3, 0))


# ---------------------------------------------------------------- counting


def test_line_count_and_closed_form_over_ten_draws():
    model = model_from_dict(LINE)
    for seed in range(10):
        data = sample_generic_data(2, seed)
        out = critical_points(assemble(model, data), CFG.with_seed(seed))
        assert out.ok and len(out.torus) == 1
        expected = data.lam / data.lam.sum()
        assert np.abs(out.torus[0] - expected).max() < 1e-10


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_hyperplane_count_one(n):
    rep = ml_degree(hyperplane_model(n), CFG, draws=2)
    assert rep.certified and rep.count == 1 and rep.per_draw_counts == [1, 1]
    lam = sample_generic_data(n, rep.data_seeds[-1]).lam
    assert np.abs(rep.solutions_sample[0] - lam / lam.sum()).max() < 1e-10


def test_parametrized_and_implicit_agree():
    a = ml_degree(model_from_dict(LINE), CFG, draws=3)
    b = ml_degree(model_from_dict(LINE_PARAM), CFG, draws=3)
    assert a.count == b.count == 1 and a.certified and b.certified


def test_reported_points_are_in_the_torus_and_on_the_model():
    model = build_U(IMPLICIT)
    rep = ml_degree(model, CFG, draws=2)
    lo, hi = TORUS_BOUNDS
    for z in rep.solutions_sample:
        assert np.all((np.abs(z) > lo) & (np.abs(z) < hi))
        for f in model.implicit:
            assert abs(f.to_complex()(list(z))) < 1e-8


def test_ml_degree_rejects_zero_draws():
    with pytest.raises(ValueError):
        ml_degree(model_from_dict(LINE), CFG, draws=0)


def test_report_serialises():
    rep = ml_degree(model_from_dict(LINE), CFG, draws=2)
    d = json.loads(json.dumps(rep.to_dict()))
    assert d["count"] == 1 and d["certified"] is True and len(d["data_seeds"]) == 2


def test_uncertified_when_tracking_cannot_finish():
    bad = TrackerConfig(step_min=0.09, step_max=0.1, corrector_max_iters=1, corrector_tol=1e-15)
    rep = ml_degree(build_Vm_param(FamilyParams(3)), bad, draws=2, max_redraws=1)
    assert not rep.certified and rep.notes
    with pytest.raises(NotCertifiedError) as info:
        euler_char_smooth(build_Vm_param(FamilyParams(3)), cfg=bad, draws=1)
    assert info.value.report is not None


# ---------------------------------------------------------------- euler


def test_euler_line():
    assert euler_char_smooth(model_from_dict(LINE), d=1, cfg=CFG, draws=3) == -1


@pytest.mark.parametrize("n", [2, 3, 4])
def test_euler_hyperplane(n):
    assert euler_char_smooth(hyperplane_model(n), cfg=CFG, draws=2) == (-1) ** (n - 1)


def test_euler_u_matches_punctured_plane_product():
    chi_punctured_line = 2 - 3  # sphere minus {0, 1, infinity}
    assert euler_char_smooth(build_U(IMPLICIT), d=2, cfg=CFG, draws=3) == chi_punctured_line**2


# ---------------------------------------------------------------- files


def test_model_file_round_trip(tmp_path):
    model = build_Vm_param(FamilyParams(3))
    path = tmp_path / "v3.json"
    path.write_text(json.dumps(model_to_dict(model)))
    back = load_model(path)
    assert back.form == PARAMETRIZED and back.n == 5 and back.params == ["x", "y"]
    assert all(a == b for a, b in zip(back.coords, model.coords))
    assert np.allclose(np.array(back.excluded_points), np.array(model.excluded_points))
    implicit = model_from_dict(model_to_dict(build_U(IMPLICIT)))
    assert implicit.implicit == build_U(IMPLICIT).implicit


@pytest.mark.parametrize(
    "spec,error",
    [
        ({"form": "implicit"}, ModelError),
        ({"n": 2, "form": "weird"}, ModelError),
        ({"n": 2, "form": "parametrized", "coords": ["x", "1-x"]}, ModelError),
        ({"n": 2, "form": "implicit", "equations": ["p1 + q"]}, ParseError),
    ],
)
def test_bad_model_specs(spec, error):
    with pytest.raises(error):
        model_from_dict(spec)
