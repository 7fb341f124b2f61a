"""Randomised property checks over series-parallel games.

Each random game is solved and checked for: per-type Nash conditions of every
solver output, the two upper bounds on heterogeneous latency relative to the
all-selfish latency, the selfish-cost comparison between heterogeneous and
all-selfish flows, equal latency across all-selfish Nash flows, and
``L(all-selfish) >= L(optimal)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .equilibrium import (
    SELFISH,
    solve_heterogeneous,
    solve_homogeneous_selfish,
    solve_optimal,
    type_cost_total,
    verify_wardrop,
)
from .latency import Latency
from .network import Edge, Node, Parallel, RoutingGame, Series, SPNetwork, game_gamma, homogenize

WARDROP_EPS = 1e-6
BOUND_SLACK = 1e-6
UNIQUE_TOL = 1e-6
DOMINANCE_TOL = 1e-9

PROPERTIES = (
    "wardrop",
    "upper_bound_low",
    "upper_bound_high",
    "selfish_cost",
    "homogeneous_unique",
    "pi_le_poa",
)

_EXPONENTS = (0.0, 1.0, 1.0, 2.0, 3.0, 1.5, 4.0)


def random_latency(rng: np.random.Generator) -> Latency:
    n_terms = int(rng.integers(1, 4))
    exps = rng.choice(_EXPONENTS, size=n_terms, replace=False)
    coefs = rng.uniform(0.1, 2.0, size=n_terms)
    return Latency(tuple(zip(coefs.round(4), exps)))


def _random_tree(rng: np.random.Generator, n_paths: int, depth: int = 0) -> Node:
    if n_paths == 1:
        if depth < 3 and rng.random() < 0.25:
            return Series(Edge(random_latency(rng)), Edge(random_latency(rng)))
        return Edge(random_latency(rng))
    factors = [a for a in range(2, n_paths) if n_paths % a == 0]
    if factors and rng.random() < 0.4:
        a = int(rng.choice(factors))
        return Series(_random_tree(rng, a, depth + 1), _random_tree(rng, n_paths // a, depth + 1))
    left = int(rng.integers(1, n_paths))
    return Parallel(_random_tree(rng, left, depth + 1), _random_tree(rng, n_paths - left, depth + 1))


def random_network(rng: np.random.Generator, max_paths: int = 6) -> SPNetwork:
    return SPNetwork(_random_tree(rng, int(rng.integers(1, max_paths + 1))))


def _random_subset(rng: np.random.Generator, n: int, keep: float = 0.7) -> tuple[int, ...]:
    if rng.random() < 0.3:
        return tuple(range(n))
    chosen = [p for p in range(n) if rng.random() < keep]
    return tuple(chosen) if chosen else (int(rng.integers(n)),)


def random_game(rng: np.random.Generator, max_paths: int = 6, parallel_only: bool = False) -> RoutingGame:
    if parallel_only:
        n = int(rng.integers(2, max_paths + 1))
        net = SPNetwork(Parallel(*[Edge(random_latency(rng)) for _ in range(n)]))
    else:
        net = random_network(rng, max_paths)
    r_s = float(rng.choice([rng.uniform(0.0, 1.0), 0.5, 0.0, 1.0], p=[0.85, 0.05, 0.05, 0.05]))
    return RoutingGame(
        net,
        _random_subset(rng, net.n_paths),
        _random_subset(rng, net.n_paths),
        round(r_s, 6),
    )


@dataclass
class InstanceResult:
    """Margins per property; a margin below zero is a violation."""

    margins: dict[str, float]
    n_equilibria: int
    n_homogeneous: int

    @property
    def ok(self) -> bool:
        return all(m >= 0.0 for m in self.margins.values())


def check_instance(game: RoutingGame) -> InstanceResult:
    gbar = homogenize(game)
    eqs = solve_heterogeneous(game)
    bars = solve_heterogeneous(gbar)
    ref = solve_homogeneous_selfish(gbar)
    opt = solve_optimal(game)
    margins: dict[str, float] = {}

    if not eqs or not bars:
        return InstanceResult({name: -np.inf for name in PROPERTIES}, len(eqs), len(bars))

    worst_violation = max(
        [verify_wardrop(game, e.flow, WARDROP_EPS).max_violation for e in eqs]
        + [verify_wardrop(gbar, b.flow, WARDROP_EPS).max_violation for b in bars + [ref]]
    )
    margins["wardrop"] = WARDROP_EPS - worst_violation

    lbar = ref.total_latency
    gamma = game_gamma(game)
    r_s = game.r_s
    low = (1.0 + r_s * (gamma - 1.0)) * lbar
    high = (gamma - r_s * (gamma - 1.0)) * lbar
    worst = max(e.total_latency for e in eqs)
    margins["upper_bound_low"] = low - worst + BOUND_SLACK
    margins["upper_bound_high"] = high - worst + BOUND_SLACK

    selfish_bar = type_cost_total(gbar, ref.flow, SELFISH)
    margins["selfish_cost"] = (
        selfish_bar - max(type_cost_total(game, e.flow, SELFISH) for e in eqs) + BOUND_SLACK
    )

    hom = [b.total_latency for b in bars] + [lbar]
    margins["homogeneous_unique"] = UNIQUE_TOL - (max(hom) - min(hom))
    margins["pi_le_poa"] = lbar - opt.total_latency + DOMINANCE_TOL
    return InstanceResult(margins, len(eqs), len(bars))


@dataclass
class SuiteResult:
    seed: int
    count: int
    failures: list[tuple[int, RoutingGame, InstanceResult]] = field(default_factory=list)
    worst_margins: dict[str, float] = field(default_factory=dict)
    equilibria: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures


def run_property_suite(count: int = 200, seed: int = 42, max_paths: int = 6) -> SuiteResult:
    rng = np.random.default_rng(seed)
    result = SuiteResult(seed, count, worst_margins={name: np.inf for name in PROPERTIES})
    for i in range(count):
        game = random_game(rng, max_paths)
        res = check_instance(game)
        result.equilibria += res.n_equilibria
        for name, m in res.margins.items():
            result.worst_margins[name] = min(result.worst_margins[name], m)
        if not res.ok:
            result.failures.append((i, game, res))
    return result
