import os
from pathlib import Path

import pytest

import femto_share as fs

SCENARIOS = Path(os.environ.get("FEMTO_SCENARIO_DIR", Path(__file__).parents[2] / "scenarios"))


def test_strategy_set_and_request():
    src = fs.SrcProfile(alpha=0.7, kappa=0.1, epsilon=0.1)
    assert fs.build_strategy_set(src).values == pytest.approx([0.6, 0.7, 0.8, 0.9, 1.0])
    bounds = fs.qos_bounds(8.0, 4.0, 300.0)
    req = fs.request_from_strategy(fs.SrcProfile(alpha=1.0), 1.0, bounds, 0.1)
    assert (req.green.lo, req.green.hi) == (2.0, 2.0)
    assert req.yellow.lo == pytest.approx(1.8)


def test_validation_maps_to_value_error():
    with pytest.raises(ValueError):
        fs.SpcProfile(mu=0.5, gamma=0.5)
    with pytest.raises(fs.ValidationError):
        fs.SrcProfile(alpha=0.3, kappa=0.8)


def test_solve_allocation_tie():
    spc = fs.SpcProfile(psi=1.0, b_s=2.0)
    point = fs.BandwidthRequest(fs.Interval(2.0, 2.0), fs.Interval(2.0, 2.0))
    sol = fs.solve_allocation([point, point], spc, 0.1)
    assert len(sol) == 2
    assert [a.color for a in sol.configs[1]] == ["green", "deny"]
    assert fs.spc_outcome(sol.configs[0], spc) == pytest.approx(sol.best_outcome)


def test_scenario_learning_and_equilibria():
    sc = fs.load_scenario(SCENARIOS / "scenario1.toml")
    assert len(sc.srcs) == 5
    assert fs.parse_scenario(sc.to_toml()) == sc
    game = sc.game()
    matrix = fs.build_payoff_matrix(game)
    assert len(matrix) == 32
    ne = fs.find_pure_ne(matrix)
    rec = fs.run_learning(game, fs.LearningParams(), seed=1)
    assert rec.converged
    assert list(rec.final_profile) in [list(p) for p in ne]
    assert fs.certify_pure_ne(game, rec.final_profile)
    again = fs.run_learning(game, fs.LearningParams(), seed=1)
    assert again.final_probs == rec.final_probs
    assert fs.best_response_dynamics(matrix, [0] * 5).steps == 0


def test_resource_cap():
    game = fs.load_scenario(SCENARIOS / "scenario2.toml").game()
    with pytest.raises(fs.ResourceError):
        fs.build_payoff_matrix(game, max_profiles=10)
