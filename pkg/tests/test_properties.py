"""Invariants of Nash flows checked on hypothesis-generated games."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from perversity.equilibrium import (
    SELFISH,
    solve_heterogeneous,
    solve_homogeneous_selfish,
    solve_optimal,
    type_cost_total,
    verify_wardrop,
)
from perversity.network import RoutingGame, homogenize
from perversity.suite import check_instance, random_game, random_network

seeds = st.integers(0, 2**32 - 1)
common = settings(max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def shared_access_game(seed: int) -> RoutingGame:
    """Random series-parallel game where both types see the same paths."""
    rng = np.random.default_rng(seed)
    net = random_network(rng, max_paths=5)
    n = net.n_paths
    paths = tuple(p for p in range(n) if rng.random() < 0.8) or (int(rng.integers(n)),)
    return RoutingGame(net, paths, paths, round(float(rng.uniform(0.02, 0.98)), 6))


@common
@given(seeds)
def test_restricted_games_satisfy_bounds(seed):
    # all suite properties except the selfish-cost comparison, which needs
    # shared path sets (see test_selfish_cost_with_shared_access)
    res = check_instance(random_game(np.random.default_rng(seed), max_paths=5))
    assert res.n_equilibria >= 1
    for name in ("wardrop", "upper_bound_low", "upper_bound_high", "homogeneous_unique", "pi_le_poa"):
        assert res.margins[name] >= 0.0, (name, res.margins[name])


@common
@given(seeds)
def test_selfish_cost_with_shared_access(seed):
    game = shared_access_game(seed)
    gbar = homogenize(game)
    ref = type_cost_total(gbar, solve_homogeneous_selfish(gbar).flow, SELFISH)
    for eq in solve_heterogeneous(game):
        assert type_cost_total(game, eq.flow, SELFISH) <= ref + 1e-6


@common
@given(seeds)
def test_nash_latency_never_beats_optimum(seed):
    game = random_game(np.random.default_rng(seed), max_paths=5)
    opt = solve_optimal(game).total_latency
    for eq in solve_heterogeneous(game):
        assert verify_wardrop(game, eq.flow, 1e-6).ok
        assert eq.total_latency >= opt - 1e-9


@common
@given(seeds)
def test_full_access_altruists_alone_reach_optimum(seed):
    rng = np.random.default_rng(seed)
    net = random_network(rng, max_paths=5)
    game = RoutingGame.full_access(net, 0.0)
    (eq,) = solve_heterogeneous(game)
    assert eq.total_latency == pytest.approx(solve_optimal(game).total_latency, abs=1e-8)


@common
@given(seeds)
def test_all_selfish_game_equals_its_homogenization(seed):
    game = random_game(np.random.default_rng(seed), max_paths=5).with_r_s(1.0)
    (eq,) = solve_heterogeneous(game)
    bar = solve_homogeneous_selfish(homogenize(game))
    assert eq.total_latency == pytest.approx(bar.total_latency, abs=1e-9)


@common
@given(seeds)
def test_equilibria_are_feasible_and_distinct(seed):
    game = random_game(np.random.default_rng(seed), max_paths=5)
    eqs = solve_heterogeneous(game)
    for i, a in enumerate(eqs):
        assert a.flow.selfish.sum() == pytest.approx(game.r_s, abs=1e-9)
        assert a.flow.altruistic.sum() == pytest.approx(game.r_a, abs=1e-9)
        assert set(np.flatnonzero(a.flow.selfish > 1e-12)) <= set(game.selfish_paths)
        assert set(np.flatnonzero(a.flow.altruistic > 1e-12)) <= set(game.altruistic_paths)
        for b in eqs[i + 1:]:
            assert a.flow.distance(b.flow) >= 1e-7


def test_selfish_cost_can_rise_when_access_differs():
    """Restricted access breaks the selfish-cost comparison.

    Seed-42 suite instance 158: selfish users may only take link 1. Under
    marginal-cost routing the altruists leave the steep link 0 and crowd
    link 1, so the captive selfish users are slower than in the all-selfish
    game. Both flows are solved here independently by brentq.
    """
    from scipy.optimize import brentq

    from perversity.latency import Latency, evaluate, marginal_cost
    from perversity.network import parallel_network

    l0 = Latency(((0.6979, 2.0), (1.768, 1.0)))
    l1 = Latency(((0.8246, 4.0), (1.0298, 0.0)))
    r_s = 0.55472
    r_a = 1.0 - r_s

    def altruist_load(cost):
        # a = altruistic load on link 0; selfish mass sits on link 1
        gap = lambda a: cost(l0, a) - cost(l1, 1.0 - a)  # noqa: E731
        if gap(r_a) <= 0.0:
            return r_a
        return brentq(gap, 0.0, r_a, xtol=1e-15)

    a_het = altruist_load(marginal_cost)
    a_bar = altruist_load(evaluate)  # a corner: every altruist on link 0
    oracle_het = r_s * evaluate(l1, 1.0 - a_het)
    oracle_bar = r_s * evaluate(l1, 1.0 - a_bar)
    assert oracle_het > oracle_bar + 0.02

    game = RoutingGame(parallel_network([l0, l1]), (1,), (0, 1), r_s)
    (eq,) = solve_heterogeneous(game)
    gbar = homogenize(game)
    bar = solve_homogeneous_selfish(gbar)
    assert type_cost_total(game, eq.flow, SELFISH) == pytest.approx(oracle_het, abs=1e-9)
    assert type_cost_total(gbar, bar.flow, SELFISH) == pytest.approx(oracle_bar, abs=1e-9)
