"""Total latency, empirical PoA / perversity index, and their closed forms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .equilibrium import (
    DEFAULT_TOL,
    EquilibriumReport,
    Flow,
    solve_optimal,
    worst_equilibrium,
)
from .network import RoutingGame, homogenize, path_latencies


def total_latency(game: RoutingGame, flow: Flow, check: bool = False) -> float:
    """``sum_e x_e l_e(x_e)``; with ``check`` also the path form, which must agree."""
    net = game.network
    xe = flow.edge_flows(net)
    edge_form = float(xe @ net.table.value(xe))
    if check:
        path_form = total_latency_by_paths(game, flow)
        if abs(edge_form - path_form) > 1e-10 * max(1.0, abs(edge_form)):
            raise AssertionError(f"edge form {edge_form!r} != path form {path_form!r}")
    return edge_form


def total_latency_by_paths(game: RoutingGame, flow: Flow) -> float:
    return float(flow.path_flows @ path_latencies(game.network, flow))


class Breakdown(NamedTuple):
    ratio: float
    worst: EquilibriumReport
    reference: EquilibriumReport


def _ratio(num: float, den: float) -> float:
    if den <= 0.0:
        return math.nan
    return num / den


def perversity_breakdown(game: RoutingGame, tol: float = DEFAULT_TOL) -> Breakdown:
    worst = worst_equilibrium(game, tol)
    selfish = worst_equilibrium(homogenize(game), tol)
    return Breakdown(_ratio(worst.total_latency, selfish.total_latency), worst, selfish)


def poa_breakdown(game: RoutingGame, tol: float = DEFAULT_TOL) -> Breakdown:
    worst = worst_equilibrium(game, tol)
    opt = solve_optimal(game, tol)
    return Breakdown(_ratio(worst.total_latency, opt.total_latency), worst, opt)


def perversity_empirical(game: RoutingGame, tol: float = DEFAULT_TOL) -> float:
    """Worst heterogeneous Nash latency over the all-selfish Nash latency.

    NaN when the all-selfish latency is zero.
    """
    return perversity_breakdown(game, tol).ratio


def poa_empirical(game: RoutingGame, tol: float = DEFAULT_TOL) -> float:
    """Worst heterogeneous Nash latency over the optimal latency (NaN if that is 0)."""
    return poa_breakdown(game, tol).ratio


def _check_rs(r_s: float) -> float:
    r_s = float(r_s)
    if not 0.0 <= r_s <= 1.0:
        raise ValueError(f"selfish fraction must lie in [0, 1], got {r_s}")
    return r_s


def _check_degree(p: int) -> int:
    if isinstance(p, bool) or int(p) != p or p < 1:
        raise ValueError(f"degree must be a positive integer, got {p!r}")
    return int(p)


def _minority(r_s: float) -> float:
    """``min(r_s, 1 - r_s)``, computed so that ``r`` and ``1 - r`` agree bitwise.

    For ``r >= 1/2`` the difference ``1 - r`` is exact; below one half
    ``1 - (1 - r)`` may differ from ``r`` by an ulp, so it is used instead.
    """
    if r_s < 0.5:
        return 1.0 - (1.0 - r_s)
    return 1.0 - r_s


def pi_theoretical(gamma: float, r_s: float) -> float:
    """Tight perversity index of the class with marginal-cost ratio ``gamma``.

    ``1 + r_s (gamma - 1)`` for ``r_s <= 1/2`` and ``gamma - r_s (gamma - 1)``
    above, evaluated as ``1 + min(r_s, 1 - r_s) (gamma - 1)``.
    """
    if not gamma >= 1.0:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    return 1.0 + _minority(_check_rs(r_s)) * (gamma - 1.0)


def pi_poly(p: int, r_s: float) -> float:
    """Perversity index for polynomial latencies of maximum degree ``p``."""
    p = _check_degree(p)
    return 1.0 + p * _minority(_check_rs(r_s))


def poa_selfish_poly(p: int) -> float:
    """Price of anarchy of all-selfish traffic with degree-``p`` polynomials."""
    p = _check_degree(p)
    return 1.0 / (1.0 - p * (p + 1.0) ** (-(p + 1.0) / p))


def r_star(p: int) -> float:
    """Selfish fraction where ``1 + p r`` meets the all-selfish price of anarchy."""
    p = _check_degree(p)
    return 1.0 / ((p + 1.0) ** ((p + 1.0) / p) - p)


@dataclass(frozen=True)
class BoundCurve:
    """Closed-form perversity index sampled over selfish fractions.

    ``kind`` is ``"gamma"`` or ``"degree"``.
    """

    kind: str
    parameter: float
    samples: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if self.kind not in ("gamma", "degree"):
            raise ValueError(f"unknown curve kind {self.kind!r}")
        rs = [r for r, _ in self.samples]
        if any(b <= a for a, b in zip(rs, rs[1:])):
            raise ValueError("r_s samples must be strictly increasing")

    @property
    def r_s(self) -> np.ndarray:
        return np.array([r for r, _ in self.samples])

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.samples])

    def rows(self) -> list[dict]:
        """Rows in the sweep CSV layout; empirical columns are left blank."""
        mode = "by_gamma" if self.kind == "gamma" else "by_degree"
        formula = poa_selfish_poly(int(self.parameter)) if self.kind == "degree" else None
        return [
            {
                "mode": mode,
                "param": self.parameter,
                "r_s": r,
                "pi_empirical": None,
                "pi_theoretical": v,
                "poa_empirical": None,
                "poa_selfish_formula": formula,
                "gap": None,
            }
            for r, v in self.samples
        ]


def bound_curve(
    r_s_grid: Sequence[float], *, gamma: float | None = None, degree: int | None = None
) -> BoundCurve:
    if (gamma is None) == (degree is None):
        raise ValueError("give exactly one of gamma or degree")
    grid = [_check_rs(r) for r in r_s_grid]
    if degree is not None:
        degree = _check_degree(degree)
        samples = tuple((r, pi_poly(degree, r)) for r in grid)
        return BoundCurve("degree", degree, samples)
    samples = tuple((r, pi_theoretical(gamma, r)) for r in grid)
    return BoundCurve("gamma", float(gamma), samples)
