"""Optimal flows and Nash flows of two-type (selfish / altruistic) routing games.

Selfish users pay path latency, altruistic users pay path marginal cost. The
heterogeneous game has no single convex potential and may have many Nash
flows, so :func:`solve_heterogeneous` enumerates support patterns and solves
the equal-cost system on each one. Homogeneous games are solved by convex
potential minimisation followed by a support-restricted Newton polish.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize

from .network import RoutingGame, SPNetwork, path_latencies, path_marginal_costs

log = logging.getLogger(__name__)

SELFISH = "selfish"
ALTRUISTIC = "altruistic"
TYPES = (SELFISH, ALTRUISTIC)

EPS_MASS = 1e-9
DEFAULT_TOL = 1e-8
DEDUP_DISTANCE = 1e-7
MASS_TOL = 1e-10


class ConvergenceError(RuntimeError):
    """A solver did not reach its tolerance within the iteration budget."""


@dataclass(frozen=True, eq=False)
class Flow:
    """Per-type path flows, indexed by the network's path order."""

    selfish: np.ndarray
    altruistic: np.ndarray

    def __post_init__(self) -> None:
        s = np.array(self.selfish, dtype=float)
        a = np.array(self.altruistic, dtype=float)
        if s.shape != a.shape or s.ndim != 1:
            raise ValueError("selfish and altruistic flows must be equal-length vectors")
        if np.any(s < 0.0) or np.any(a < 0.0):
            raise ValueError("path flows must be nonnegative")
        s.flags.writeable = False
        a.flags.writeable = False
        object.__setattr__(self, "selfish", s)
        object.__setattr__(self, "altruistic", a)

    @property
    def path_flows(self) -> np.ndarray:
        return self.selfish + self.altruistic

    def of(self, kind: str) -> np.ndarray:
        return self.selfish if kind == SELFISH else self.altruistic

    def edge_flows(self, net: SPNetwork) -> np.ndarray:
        return net.incidence @ self.path_flows

    def distance(self, other: Flow) -> float:
        return float(
            np.max(
                np.abs(
                    np.concatenate(
                        [self.selfish - other.selfish, self.altruistic - other.altruistic]
                    )
                )
            )
        )

    def __repr__(self) -> str:
        return f"Flow(selfish={self.selfish.round(6)}, altruistic={self.altruistic.round(6)})"


def check_feasible(game: RoutingGame, flow: Flow, tol: float = MASS_TOL) -> None:
    """Raise ``ValueError`` unless ``flow`` routes each type's mass on its own paths."""
    n = game.network.n_paths
    if flow.selfish.shape != (n,):
        raise ValueError(f"flow has {flow.selfish.size} entries, network has {n} paths")
    for kind, mass, allowed in (
        (SELFISH, game.r_s, game.selfish_paths),
        (ALTRUISTIC, game.r_a, game.altruistic_paths),
    ):
        x = flow.of(kind)
        if abs(x.sum() - mass) > tol:
            raise ValueError(f"{kind} flow sums to {x.sum():.12g}, expected {mass:.12g}")
        outside = np.setdiff1d(np.flatnonzero(x > 0.0), allowed)
        if outside.size:
            raise ValueError(f"{kind} flow uses inaccessible paths {outside.tolist()}")


class WardropCheck(NamedTuple):
    ok: bool
    max_violation: float
    # (type, used path, cheaper path) for the largest violation
    witness: tuple[str, int, int] | None


@dataclass(frozen=True, eq=False)
class EquilibriumReport:
    flow: Flow
    total_latency: float
    common_latency_selfish: float | None
    common_mc_altruistic: float | None
    max_wardrop_violation: float
    support_pattern: dict[str, tuple[int, ...]]
    converged: bool = True
    iterations: int = 0
    extras: dict = field(default_factory=dict)


# -- costs ------------------------------------------------------------------


def _mode(game: RoutingGame, kind: str) -> str:
    if kind == SELFISH or game.altruists_selfish:
        return "latency"
    return "marginal"


def _mass(game: RoutingGame, kind: str) -> float:
    return game.r_s if kind == SELFISH else game.r_a


def _allowed(game: RoutingGame, kind: str) -> tuple[int, ...]:
    return game.selfish_paths if kind == SELFISH else game.altruistic_paths


def type_costs(game: RoutingGame, flow: Flow, kind: str) -> np.ndarray:
    """Cost of every path as perceived by ``kind`` (entries off its path set included)."""
    if _mode(game, kind) == "latency":
        return path_latencies(game.network, flow)
    return path_marginal_costs(game.network, flow)


def cost_selfish(game: RoutingGame, flow: Flow, p: int) -> float:
    if p not in game.selfish_paths:
        raise KeyError(f"path {p} is not accessible to selfish traffic")
    return float(path_latencies(game.network, flow)[p])


def cost_altruistic(game: RoutingGame, flow: Flow, p: int) -> float:
    if p not in game.altruistic_paths:
        raise KeyError(f"path {p} is not accessible to altruistic traffic")
    return float(path_marginal_costs(game.network, flow)[p])


def _total_latency(net: SPNetwork, flow: Flow) -> float:
    xe = flow.edge_flows(net)
    return float(xe @ net.table.value(xe))


def type_cost_total(game: RoutingGame, flow: Flow, kind: str) -> float:
    """Latency (time) cost borne by one type: ``sum_p x^y_p l_p(x)``."""
    if kind not in TYPES:
        raise ValueError(f"unknown type {kind!r}")
    return float(flow.of(kind) @ path_latencies(game.network, flow))


# -- Wardrop check ----------------------------------------------------------


def verify_wardrop(
    game: RoutingGame, flow: Flow, eps: float = 1e-6, eps_mass: float = EPS_MASS
) -> WardropCheck:
    """Check that every used path of each type is a cheapest accessible one.

    A path is used when the type puts more than ``eps_mass`` on it; it
    violates the condition by ``J_p - min J`` when that exceeds ``eps``.
    """
    worst = 0.0
    witness = None
    for kind in TYPES:
        allowed = np.asarray(_allowed(game, kind), dtype=int)
        if _mass(game, kind) <= 0.0 or allowed.size == 0:
            continue
        costs = type_costs(game, flow, kind)[allowed]
        best = int(np.argmin(costs))
        used = flow.of(kind)[allowed] > eps_mass
        if not used.any():
            continue
        gaps = np.where(used, costs - costs[best], -np.inf)
        k = int(np.argmax(gaps))
        if gaps[k] > worst:
            worst = float(gaps[k])
            witness = (kind, int(allowed[k]), int(allowed[best]))
    return WardropCheck(worst <= eps, worst, witness if worst > eps else None)


def _report(
    game: RoutingGame,
    flow: Flow,
    eps_mass: float = EPS_MASS,
    converged: bool = True,
    iterations: int = 0,
) -> EquilibriumReport:
    common: dict[str, float | None] = {}
    support: dict[str, tuple[int, ...]] = {}
    for kind in TYPES:
        x = flow.of(kind)
        used = tuple(int(p) for p in np.flatnonzero(x > eps_mass))
        support[kind] = used
        if _mass(game, kind) > 0.0 and used:
            common[kind] = float(np.max(type_costs(game, flow, kind)[list(used)]))
        else:
            common[kind] = None
    check = verify_wardrop(game, flow, eps=np.inf, eps_mass=eps_mass)
    return EquilibriumReport(
        flow=flow,
        total_latency=_total_latency(game.network, flow),
        common_latency_selfish=common[SELFISH],
        common_mc_altruistic=common[ALTRUISTIC],
        max_wardrop_violation=check.max_violation,
        support_pattern=support,
        converged=converged,
        iterations=iterations,
    )


# -- support-restricted Newton ----------------------------------------------


class _Population(NamedTuple):
    mass: float
    paths: tuple[int, ...]
    mode: str  # "latency" or "marginal"


def _populations(game: RoutingGame) -> list[_Population]:
    return [
        _Population(_mass(game, kind), _allowed(game, kind), _mode(game, kind))
        for kind in TYPES
    ]


def _path_costs(net: SPNetwork, total: np.ndarray, mode: str, with_jac: bool = False):
    """Path costs, and optionally their Jacobian w.r.t. combined path flows."""
    a = net.incidence
    cost, slope = net.table.extended(a @ total, marginal=(mode == "marginal"))
    if not with_jac:
        return a.T @ cost, None
    return a.T @ cost, a.T @ (slope[:, None] * a)


class _SupportSystem:
    """Equal-cost system of a fixed support pattern.

    Unknowns are each active population's flows on its support followed by
    one common cost per population. Residuals are ``J_p - lambda`` on the
    support and the mass balance of each population.
    """

    def __init__(self, net: SPNetwork, pops: Sequence[_Population], supports):
        self.net = net
        self.pops = pops
        self.active = [k for k, pop in enumerate(pops) if pop.mass > 0.0]
        self.idx = [np.asarray(supports[k], dtype=int) for k in self.active]
        sizes = [len(i) for i in self.idx]
        self.nx = sum(sizes)
        self.offs = np.cumsum([0] + sizes)
        self.masses = np.array([pops[k].mass for k in self.active])
        self.modes = sorted({pops[k].mode for k in self.active})
        all_idx = np.concatenate(self.idx)
        self.blocks = [np.ix_(i, all_idx) for i in self.idx]
        # scatter matrix from stacked support flows to combined path flows
        self.scatter = np.zeros((net.n_paths, self.nx))
        self.scatter[all_idx, np.arange(self.nx)] = 1.0

    def unpack(self, z: np.ndarray) -> np.ndarray:
        flows = np.zeros((len(self.pops), self.net.n_paths))
        for j, k in enumerate(self.active):
            flows[k, self.idx[j]] = z[self.offs[j] : self.offs[j + 1]]
        return flows

    def start(self, x0: np.ndarray | None) -> np.ndarray:
        if x0 is None:
            parts = [np.full(len(i), m / len(i)) for i, m in zip(self.idx, self.masses)]
        else:
            parts = [x0[k, i] for k, i in zip(self.active, self.idx)]
        z = np.concatenate(parts + [np.zeros(len(self.active))])
        total = self.scatter @ z[: self.nx]
        for j, k in enumerate(self.active):
            cost, _ = _path_costs(self.net, total, self.pops[k].mode)
            z[self.nx + j] = cost[self.idx[j]].mean()
        return z

    def residual(self, z: np.ndarray, with_jac: bool = False):
        nx, offs, nact = self.nx, self.offs, len(self.active)
        total = self.scatter @ z[:nx]
        costs = {m: _path_costs(self.net, total, m, with_jac) for m in self.modes}
        f = np.empty(nx + nact)
        jac = np.zeros((nx + nact, nx + nact)) if with_jac else None
        for j, k in enumerate(self.active):
            cost, dcost = costs[self.pops[k].mode]
            rows = slice(offs[j], offs[j + 1])
            f[rows] = cost[self.idx[j]] - z[nx + j]
            f[nx + j] = z[rows].sum() - self.masses[j]
            if with_jac:
                jac[rows, :nx] = dcost[self.blocks[j]]
                jac[rows, nx + j] = -1.0
                jac[nx + j, rows] = 1.0
        return (f, jac) if with_jac else f


def _solve_support(
    net: SPNetwork,
    pops: Sequence[_Population],
    supports: Sequence[Sequence[int]],
    x0: np.ndarray | None = None,
    tol: float = 1e-12,
    max_iter: int = 40,
) -> np.ndarray | None:
    """Solve the equal-cost system on a fixed support pattern.

    Damped Newton with minimum-norm least-squares steps, so patterns in which
    both populations share a path (a continuum of solutions) are handled.
    Iterates may leave the nonnegative orthant; costs are continued linearly
    below zero flow. Returns the ``(n_pops, n_paths)`` flow matrix when the
    solution is nonnegative, otherwise ``None``.
    """
    system = _SupportSystem(net, pops, supports)
    nx = system.nx
    z = system.start(x0)
    f, jac = system.residual(z, with_jac=True)
    norm = float(np.linalg.norm(f))
    for _ in range(max_iter):
        scale = max(1.0, float(np.max(np.abs(z[nx:]))))
        if np.max(np.abs(f)) <= tol * scale:
            break
        step = np.linalg.lstsq(jac, -f, rcond=None)[0]
        t = 1.0
        while True:
            cand = z + t * step
            fc = system.residual(cand)
            nc = float(np.linalg.norm(fc))
            if nc < (1.0 - 1e-4 * t) * norm:
                break
            t *= 0.5
            if t < 1e-3:
                return None
        z = cand
        # converged onto a solution with a clearly negative support flow
        if nc < 1e-6 and np.min(z[:nx]) < -1e-6:
            return None
        f, jac = system.residual(z, with_jac=True)
        norm = float(np.linalg.norm(f))
    else:
        return None
    scale = max(1.0, float(np.max(np.abs(z[nx:]))))
    if np.max(np.abs(f)) > tol * scale or np.min(z[:nx]) < -1e-12:
        return None
    return system.unpack(z)


def _to_flow(matrix: np.ndarray) -> Flow:
    return Flow(np.maximum(matrix[0], 0.0), np.maximum(matrix[1], 0.0))


def _subsets(paths: Sequence[int]):
    for size in range(1, len(paths) + 1):
        yield from combinations(paths, size)


def _dedup(reports: list[EquilibriumReport]) -> list[EquilibriumReport]:
    kept: list[EquilibriumReport] = []
    for rep in reports:
        if all(rep.flow.distance(k.flow) >= DEDUP_DISTANCE for k in kept):
            kept.append(rep)
    return kept


def _polish(game: RoutingGame, flow: Flow, tol: float) -> Flow | None:
    """Snap an approximate equilibrium to the exact solution on its support."""
    pops = _populations(game)
    net = game.network
    x0 = np.vstack([flow.selfish, flow.altruistic])
    candidates = []
    for threshold in (1e-6, 1e-9, 1e-4):
        candidates.append([tuple(np.flatnonzero(x0[k] > threshold)) for k in range(2)])
    for supports in candidates:
        if any(pops[k].mass > 0.0 and not supports[k] for k in range(2)):
            continue
        mat = _solve_support(net, pops, supports, x0=x0)
        if mat is None:
            continue
        cand = _to_flow(mat)
        if verify_wardrop(game, cand, eps=tol).ok:
            return cand
    return None


# -- homogeneous solvers ----------------------------------------------------


def _minimize_potential(
    net: SPNetwork, pops: Sequence[_Population], objective: str
) -> np.ndarray:
    """Minimise a convex separable edge potential over per-population path flows.

    ``objective`` is ``"beckmann"`` (integral of latency: selfish equilibria)
    or ``"total"`` (total latency: optima and all-altruistic equilibria).
    """
    n = net.n_paths
    active = [k for k, pop in enumerate(pops) if pop.mass > 0.0]
    idx = [np.asarray(pops[k].paths, dtype=int) for k in active]
    sizes = [len(i) for i in idx]
    offs = np.cumsum([0] + sizes)
    a = net.incidence

    def unpack(z):
        flows = np.zeros((len(pops), n))
        for j, k in enumerate(active):
            flows[k, idx[j]] = z[offs[j] : offs[j + 1]]
        return flows

    def fun(z):
        xe = a @ unpack(z).sum(axis=0)
        if objective == "beckmann":
            val = net.table.integral(xe).sum()
            grad_e = net.table.value(xe)
        else:
            val = float(xe @ net.table.value(xe))
            grad_e = net.table.marginal(xe)
        gp = a.T @ grad_e
        return val, np.concatenate([gp[i] for i in idx])

    cons = []
    for j, k in enumerate(active):
        row = np.zeros(offs[-1])
        row[offs[j] : offs[j + 1]] = 1.0
        cons.append(
            {"type": "eq", "fun": lambda z, r=row, m=pops[k].mass: r @ z - m, "jac": lambda z, r=row: r}
        )
    bounds = [(0.0, pops[k].mass) for j, k in enumerate(active) for _ in range(sizes[j])]
    z0 = np.concatenate([np.full(sizes[j], pops[k].mass / sizes[j]) for j, k in enumerate(active)])
    with warnings.catch_warnings():
        # SLSQP clips its own out-of-bounds trial points; nothing to act on
        warnings.simplefilter("ignore", RuntimeWarning)
        res = _run_slsqp(fun, z0, bounds, cons)
    z = np.clip(res.x, 0.0, None)
    # restore exact masses after clipping
    for j, k in enumerate(active):
        seg = z[offs[j] : offs[j + 1]]
        if seg.sum() > 0.0:
            z[offs[j] : offs[j + 1]] = seg * (pops[k].mass / seg.sum())
    return unpack(z)


def _run_slsqp(fun, z0, bounds, cons):
    return minimize(
        fun,
        z0,
        jac=True,
        method="SLSQP",
        bounds=bounds,
        constraints=cons,
        options={"ftol": 1e-15, "maxiter": 1000},
    )


def _solve_convex(game: RoutingGame, objective: str, tol: float) -> EquilibriumReport:
    pops = _populations(game)
    mat = _minimize_potential(game.network, pops, objective)
    flow = _to_flow(mat)
    polished = _polish(game, flow, tol)
    if polished is not None:
        return _report(game, polished)
    rep = _report(game, flow)
    if rep.max_wardrop_violation > tol:
        log.warning(
            "potential minimiser stopped with Wardrop violation %.3g", rep.max_wardrop_violation
        )
        return _report(game, flow, converged=False)
    return rep


def beckmann_potential(game: RoutingGame, flow: Flow) -> float:
    """Sum over edges of the integral of the latency up to the edge flow."""
    return float(game.network.table.integral(flow.edge_flows(game.network)).sum())


def beckmann_gradient(game: RoutingGame, flow: Flow) -> tuple[np.ndarray, np.ndarray]:
    """Gradient of the potential w.r.t. selfish and altruistic path flows.

    Both blocks equal the path latencies: the potential depends on path
    flows only through edge flows.
    """
    lat = path_latencies(game.network, flow)
    return lat.copy(), lat.copy()


def solve_homogeneous_selfish(game: RoutingGame, tol: float = DEFAULT_TOL) -> EquilibriumReport:
    """Nash flow when all traffic routes on latency.

    Each type keeps its own path set. ``game`` must be homogenized or have
    ``r_s == 1``.
    """
    if not game.altruists_selfish and game.r_a > 0.0:
        raise ValueError("game still has altruistic traffic; homogenize it first")
    return _solve_convex(game, "beckmann", tol)


def solve_homogeneous_altruistic(
    game: RoutingGame, tol: float = DEFAULT_TOL
) -> EquilibriumReport:
    """Nash flow of an all-altruistic game: a latency minimiser over ``P^a``."""
    if game.r_s > 0.0 or game.altruists_selfish:
        raise ValueError("requires r_s == 0 and altruists using marginal cost")
    return _solve_convex(game, "total", tol)


def solve_optimal(game: RoutingGame, tol: float = DEFAULT_TOL) -> EquilibriumReport:
    """Minimum total latency over all routings of the unit mass on every path.

    Path restrictions and types play no role. The optimal routing is reported
    in the ``selfish`` slot of the flow with the ``altruistic`` slot empty.
    """
    relaxed = RoutingGame(game.network, game.all_paths, game.all_paths, 1.0)
    pops = [_Population(1.0, relaxed.all_paths, "marginal"), _Population(0.0, (), "marginal")]
    mat = _minimize_potential(game.network, pops, "total")
    flow = _to_flow(mat)
    x0 = np.vstack([flow.selfish, flow.altruistic])
    for threshold in (1e-6, 1e-9, 1e-4):
        support = tuple(np.flatnonzero(x0[0] > threshold))
        sol = _solve_support(game.network, pops, [support, ()], x0=x0)
        if sol is None:
            continue
        cand = _to_flow(sol)
        costs = path_marginal_costs(game.network, cand)
        used = cand.selfish > EPS_MASS
        if np.max(costs[used]) - np.min(costs) <= tol:
            flow = cand
            break
    rep = _report(relaxed, flow)
    costs = path_marginal_costs(game.network, flow)
    return EquilibriumReport(
        flow=flow,
        total_latency=rep.total_latency,
        common_latency_selfish=None,
        common_mc_altruistic=float(np.max(costs[flow.selfish > EPS_MASS])),
        max_wardrop_violation=float(
            np.max(costs[flow.selfish > EPS_MASS]) - np.min(costs)
        ),
        support_pattern={SELFISH: rep.support_pattern[SELFISH], ALTRUISTIC: ()},
    )


# -- heterogeneous enumeration ------------------------------------------------


def solve_heterogeneous(game: RoutingGame, tol: float = DEFAULT_TOL) -> list[EquilibriumReport]:
    """Every Nash flow found by support-pattern enumeration.

    Patterns are pairs of nonempty subsets of each type's path set (the
    zero-mass type is left out), visited by increasing size. Each pattern's
    equal-cost system is solved and the resulting flow is kept when it passes
    :func:`verify_wardrop` at ``tol``. Flows closer than ``1e-7`` are merged.
    ``r_s`` of exactly 0 or 1 is routed to the homogeneous solvers.
    """
    if game.r_s == 1.0 or (game.altruists_selfish and game.r_s == 0.0):
        return [solve_homogeneous_selfish(game, tol)]
    if game.r_s == 0.0:
        return [solve_homogeneous_altruistic(game, tol)]
    pops = _populations(game)
    net = game.network
    found: list[EquilibriumReport] = []
    for s_support in _subsets(game.selfish_paths):
        for a_support in _subsets(game.altruistic_paths):
            supports = (s_support, a_support)
            mat = _solve_support(net, pops, supports)
            if mat is None:
                continue
            flow = _to_flow(mat)
            if not verify_wardrop(game, flow, eps=tol).ok:
                continue
            rep = _report(game, flow)
            if all(rep.flow.distance(k.flow) >= DEDUP_DISTANCE for k in found):
                found.append(rep)
    if not found:
        log.warning("no support pattern produced a verified Nash flow")
    return found


def worst_equilibrium(
    game: RoutingGame,
    tol: float = DEFAULT_TOL,
    equilibria: list[EquilibriumReport] | None = None,
) -> EquilibriumReport:
    """The found Nash flow with the largest total latency (earliest on ties).

    For a homogenized game every Nash flow has the same total latency, so the
    potential minimiser's flow is returned without enumeration.
    """
    if equilibria is not None:
        reports = equilibria
    elif game.altruists_selfish or game.r_a == 0.0:
        reports = [solve_homogeneous_selfish(game, tol)]
    else:
        reports = solve_heterogeneous(game, tol)
    if not reports:
        raise ConvergenceError("no Nash flow found")
    best = reports[0]
    for rep in reports[1:]:
        if rep.total_latency > best.total_latency + 1e-9:
            best = rep
    return best


# -- best-response dynamics ---------------------------------------------------


def random_flow(game: RoutingGame, rng: np.random.Generator) -> Flow:
    """A feasible flow with Dirichlet-distributed splits per type."""
    n = game.network.n_paths
    parts = []
    for kind in TYPES:
        x = np.zeros(n)
        allowed = list(_allowed(game, kind))
        mass = _mass(game, kind)
        if mass > 0.0:
            x[allowed] = rng.dirichlet(np.ones(len(allowed))) * mass
        parts.append(x)
    return Flow(*parts)


def wardrop_gap(game: RoutingGame, flow: Flow) -> float:
    """Flow-weighted excess cost ``sum_y sum_p x^y_p (J^y_p - min J^y)``."""
    gap = 0.0
    for kind in TYPES:
        allowed = list(_allowed(game, kind))
        if _mass(game, kind) <= 0.0 or not allowed:
            continue
        costs = type_costs(game, flow, kind)[allowed]
        gap += float(flow.of(kind)[allowed] @ (costs - costs.min()))
    return gap


def best_response_dynamics(
    game: RoutingGame,
    initial: Flow,
    max_iters: int = 100_000,
    tol: float = 1e-5,
) -> EquilibriumReport:
    """Method of successive averages on each type's best response.

    At iteration ``k`` every type moves a ``1/(k+2)`` share of its mass onto
    its cheapest accessible path (lowest index on ties). Stops once the
    flow-weighted Wardrop gap (see :func:`wardrop_gap`) drops to ``tol``; the
    report is flagged non-converged when the budget runs out first.

    Flow left on unused paths decays only like ``1/k`` and so does the gap:
    ``tol = 1e-5`` typically takes 1e3 to 5e4 iterations.
    """
    return best_response_dynamics_many(game, [initial], max_iters, tol)[0]


def best_response_dynamics_many(
    game: RoutingGame,
    initials: Sequence[Flow],
    max_iters: int = 100_000,
    tol: float = 1e-5,
) -> list[EquilibriumReport]:
    """:func:`best_response_dynamics` from several starts, run in lockstep.

    Every start follows exactly the trajectory it would follow alone; the
    batch only shares the per-iteration numpy overhead.
    """
    if not initials:
        return []
    for flow in initials:
        check_feasible(game, flow)
    net = game.network
    a = net.incidence
    table = net.table
    # per-type cost coefficients: latency or marginal cost
    coefs = np.stack(
        [table.coefs if _mode(game, kind) == "latency" else table.mc_coefs for kind in TYPES]
    )
    exps = table.exps
    x = np.stack([np.vstack([f.selfish, f.altruistic]) for f in initials]).astype(float)
    masses = np.array([game.r_s, game.r_a])
    mask = np.zeros(x.shape[1:], dtype=bool)
    mask[0, list(game.selfish_paths)] = masses[0] > 0.0
    mask[1, list(game.altruistic_paths)] = masses[1] > 0.0
    rows = np.flatnonzero(mask.any(axis=1))
    blocked = np.where(mask, 0.0, np.inf)

    n = len(initials)
    active = np.arange(n)
    stopped_at = np.full(n, max_iters)
    converged = np.zeros(n, dtype=bool)
    excess = np.zeros((n, *mask.shape))
    for k in range(max_iters + 1):
        xa = x[active]
        xe = xa.sum(axis=1) @ a.T
        powers = np.clip(xe, 0.0, 1.0)[:, :, None] ** exps
        costs = np.einsum("tek,bek->bte", coefs, powers) @ a + blocked
        best = costs.argmin(axis=2)
        lowest = costs.min(axis=2, keepdims=True)
        ex = excess[: len(active)]
        ex.fill(0.0)
        np.subtract(costs, lowest, out=ex, where=mask)
        gaps = (xa * ex).sum(axis=(1, 2))
        done = gaps <= tol
        if done.any():
            converged[active[done]] = True
            stopped_at[active[done]] = k
            active, best = active[~done], best[~done]
            if active.size == 0:
                break
        if k == max_iters:
            break
        step = 1.0 / (k + 2)
        x[active] *= 1.0 - step
        for t in rows:
            x[active, t, best[:, t]] += step * masses[t]
    return [
        _report(
            game,
            Flow(x[b, 0], x[b, 1]),
            eps_mass=tol,
            converged=bool(converged[b]),
            iterations=int(stopped_at[b]),
        )
        for b in range(n)
    ]
