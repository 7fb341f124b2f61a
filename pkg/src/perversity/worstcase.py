"""Tight lower-bound instances and the classical Pigou networks."""

from __future__ import annotations

from dataclasses import dataclass

from .equilibrium import DEFAULT_TOL, Flow
from .latency import Latency, evaluate, marginal_cost
from .metrics import perversity_breakdown, pi_theoretical
from .network import Edge, Parallel, RoutingGame, SPNetwork


def steep_latency(gamma: float, r: float) -> Latency:
    """Convex latency ``f`` with ``f(r) = 1`` and ``f_mc(r) = gamma``.

    For ``gamma > 2`` this is the monomial ``(x / r)**(gamma - 1)``, whose
    marginal-cost ratio is ``gamma`` everywhere. Below that the monomial would
    be concave, so the affine ``(2 - gamma) + (gamma - 1) x / r`` is used. Its
    ratio increases with ``x`` and exceeds ``gamma`` on ``(r, 1]`` when
    ``1 < gamma < 2`` and ``r < 1``; no convex function can avoid that, but the
    Nash flows of :func:`lemma3_instance` never load it beyond ``r``.
    """
    if not gamma >= 1.0:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    if not 0.0 < r <= 1.0:
        raise ValueError(f"r must lie in (0, 1], got {r}")
    if gamma > 2.0:
        return Latency.monomial(r ** (1.0 - gamma), gamma - 1.0)
    if gamma == 1.0:
        return Latency.constant(1.0)
    if gamma == 2.0:
        return Latency.monomial(1.0 / r, 1.0)
    return Latency.affine(2.0 - gamma, (gamma - 1.0) / r)


def lemma3_instance(gamma: float, r_s: float) -> RoutingGame:
    """Three parallel links ``(gamma, f, 1)``; altruists may use only the first two.

    ``f`` comes from :func:`steep_latency` at ``r = max(r_s, 1 - r_s)``. Paths
    are indexed 0, 1, 2 in link order.
    """
    if not 0.0 <= r_s <= 1.0:
        raise ValueError(f"r_s must lie in [0, 1], got {r_s}")
    r = max(r_s, 1.0 - r_s)
    middle = steep_latency(gamma, r)
    if abs(evaluate(middle, r) - 1.0) > 1e-12 or abs(marginal_cost(middle, r) - gamma) > 1e-12:
        raise AssertionError("steep link misses its point conditions")
    net = SPNetwork(
        Parallel(
            Edge(Latency.constant(gamma), "top"),
            Edge(middle, "middle"),
            Edge(Latency.constant(1.0), "bottom"),
        )
    )
    return RoutingGame(net, (0, 1, 2), (0, 1), r_s)


def lemma3_flows(gamma: float, r_s: float) -> tuple[Flow, Flow]:
    """The heterogeneous Nash flow ``(1-r, r, 0)`` and the all-selfish flow ``(0, r, 1-r)``.

    In the former the altruists put ``1 - r`` on the top link; in the latter
    they sit on the middle link (they cannot reach the bottom one) and the
    selfish users fill the rest of the middle link.
    """
    r_a = 1.0 - r_s
    r = max(r_s, r_a)
    top = 1.0 - r
    hetero = Flow([0.0, r_s, 0.0], [top, r_a - top, 0.0])
    s_mid = r - r_a
    homog = Flow([0.0, s_mid, r_s - s_mid], [0.0, r_a, 0.0])
    return hetero, homog


def pigou_instance(p: int, r_s: float = 1.0) -> RoutingGame:
    """Two parallel links ``x**p`` and ``1`` with full access for both types."""
    if isinstance(p, bool) or int(p) != p or p < 1:
        raise ValueError(f"degree must be a positive integer, got {p!r}")
    net = SPNetwork(
        Parallel(Edge(Latency.monomial(1.0, float(p)), "steep"), Edge(Latency.constant(1.0), "flat"))
    )
    return RoutingGame.full_access(net, r_s)


@dataclass(frozen=True, eq=False)
class TightnessReport:
    gamma: float
    r_s: float
    empirical_pi: float
    theoretical_pi: float
    gap: float
    heterogeneous_flow: Flow
    homogeneous_flow: Flow
    tol: float

    @property
    def ok(self) -> bool:
        return self.gap <= self.tol


def verify_tightness(gamma: float, r_s: float, tol: float = 1e-6) -> TightnessReport:
    """Compare the solved perversity index of the tight instance with the closed form."""
    game = lemma3_instance(gamma, r_s)
    res = perversity_breakdown(game, DEFAULT_TOL)
    theory = pi_theoretical(gamma, r_s)
    return TightnessReport(
        gamma=gamma,
        r_s=r_s,
        empirical_pi=res.ratio,
        theoretical_pi=theory,
        gap=abs(res.ratio - theory),
        heterogeneous_flow=res.worst.flow,
        homogeneous_flow=res.reference.flow,
        tol=tol,
    )
