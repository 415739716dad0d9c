"""Bandwidth sharing game between a femto-cell owner and its requesters."""

from ._core import (
    AllocationAnswer,
    BandwidthRequest,
    BrdResult,
    Game,
    Interval,
    LearningParams,
    PayoffMatrix,
    QosBounds,
    ResourceError,
    RunRecord,
    Scenario,
    SolutionSet,
    SpcProfile,
    SrcProfile,
    StrategySet,
    ValidationError,
    __version__,
    best_response_dynamics,
    build_payoff_matrix,
    build_strategy_set,
    certify_pure_ne,
    find_pure_ne,
    load_scenario,
    make_game,
    parse_scenario,
    qos_bounds,
    request_from_strategy,
    run_learning,
    solve_allocation,
    spc_outcome,
    src_utility,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
