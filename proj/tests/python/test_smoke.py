import math

import numpy as np
import pytest

import _proxboost as pb


def test_rng_determinism():
    a = pb.RngStream(42, [3, 1])
    b = pb.RngStream(42, [3, 1])
    assert [a.uniform() for _ in range(100)] == [b.uniform() for _ in range(100)]


def test_robust_select_five_point_line():
    pts = [np.array([v]) for v in (0.0, 0.05, -0.05, 4.0, 9.0)]
    index, point, radius = pb.robust_select(pts)
    assert index == 0
    assert point[0] == pytest.approx(0.0)
    assert radius == pytest.approx(0.05)
    assert pb.weak_radius(pts, 3) == pytest.approx(4.0)
    kept = pb.extract(pts)
    assert len(kept) >= 3
    assert all(abs(pts[i][0]) <= 0.05 for i in kept)


def test_moreau_envelope_values():
    value, deriv = pb.moreau_envelope("abs", 1.0, 2.0)
    assert value == pytest.approx(1.5)
    assert deriv == pytest.approx(1.0)
    value, _ = pb.moreau_envelope("abs", 0.5, 0.25)
    assert value == pytest.approx(0.0625)
    value, deriv = pb.moreau_envelope("hinge", 1.0, -3.0)
    assert value == 0.0 and deriv == 0.0


def test_schedule_parameters():
    sched = pb.geometric_schedule(1.0, 16.0, 1.0, 0.01)
    assert sched["T"] == 4
    assert sched["m"] == 116
    assert sched["delta"] == pytest.approx(0.1)
    assert pb.epsilon_schedule(0.5, 1.0, 3.0) == pytest.approx(0.5)


def test_clopper_pearson():
    assert pb.clopper_pearson_upper(0, 100, 0.95) == pytest.approx(
        1 - 0.05 ** (1 / 100), abs=1e-9
    )
    assert pb.clopper_pearson_upper(10, 100, 0.95) == pytest.approx(0.163718, abs=1e-5)


def test_boost_alg_noiseless_quadratic():
    problem = pb.make_quadratic(5, 1.0, 16.0, 0.0, seed=3)
    x_in = problem.minimizer + np.ones(5)
    result = pb.boost_alg(problem, x_in, eps=1e-3, p=0.1, seed=7)
    assert result["final_gap"] <= 1e-3
    assert result["T"] == 4
    assert result["samples"] > 0


def test_run_trials_deterministic():
    config = """
problem = quadratic
dim = 3
mu = 1.0
lip_grad = 4.0
sigma2 = 0.5
tail = student_t
dof = 2.5
problem_seed = 3
method = boost-alg
oracle = sgd
eps_rel = 0.05
p = 0.2
init_distance = 2.0
R = 3
"""
    records_a, summary_a = pb.run_trials(config, seed=11, jobs=1)
    records_b, summary_b = pb.run_trials(config, seed=11, jobs=2)
    assert len(records_a) == 3
    assert summary_a == summary_b
    for ra, rb in zip(records_a, records_b):
        assert ra["final_gap"] == rb["final_gap"]
        assert ra["samples_used"] == rb["samples_used"]
    assert all(not r["error"] for r in records_a)
    assert math.isfinite(summary_a["upper95"])
