"""Nash flows, perversity index and price of anarchy for routing games with
selfish and altruistic traffic on series-parallel networks.
"""

from __future__ import annotations

from .equilibrium import (
    ALTRUISTIC,
    SELFISH,
    ConvergenceError,
    EquilibriumReport,
    Flow,
    WardropCheck,
    best_response_dynamics,
    best_response_dynamics_many,
    check_feasible,
    cost_altruistic,
    cost_selfish,
    random_flow,
    solve_heterogeneous,
    solve_homogeneous_altruistic,
    solve_homogeneous_selfish,
    solve_optimal,
    type_cost_total,
    verify_wardrop,
    wardrop_gap,
    worst_equilibrium,
)
from .gamefile import GameFileError
from .latency import (
    DomainError,
    Latency,
    derivative,
    evaluate,
    gamma_bound,
    marginal_cost,
    potential,
    toll,
)
from .metrics import (
    BoundCurve,
    bound_curve,
    perversity_empirical,
    pi_poly,
    pi_theoretical,
    poa_empirical,
    poa_selfish_poly,
    r_star,
    total_latency,
)
from .network import (
    Edge,
    Parallel,
    PathLimitError,
    RoutingGame,
    Series,
    SPNetwork,
    edge_flow,
    enumerate_paths,
    game_gamma,
    homogenize,
    path_latency,
    path_marginal_cost,
)
from .worstcase import lemma3_flows, lemma3_instance, pigou_instance, verify_tightness

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
