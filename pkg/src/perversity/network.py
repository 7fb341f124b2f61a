"""Two-terminal series-parallel networks and two-type routing games."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import product
from typing import Iterable, Sequence, Union

import numpy as np

from .latency import Latency, LatencyTable, evaluate, gamma_bound, marginal_cost

DEFAULT_PATH_CAP = 64


class PathLimitError(RuntimeError):
    """The network has more s-t paths than the configured cap."""


@dataclass(frozen=True)
class Edge:
    latency: Latency
    name: str | None = None


@dataclass(frozen=True)
class Series:
    children: tuple[Node, ...]

    def __init__(self, *children: Node):
        object.__setattr__(self, "children", _flatten_children(children))
        if len(self.children) < 2:
            raise ValueError("a series composition needs at least two children")


@dataclass(frozen=True)
class Parallel:
    children: tuple[Node, ...]

    def __init__(self, *children: Node):
        object.__setattr__(self, "children", _flatten_children(children))
        if len(self.children) < 2:
            raise ValueError("a parallel composition needs at least two children")


Node = Union[Edge, Series, Parallel]


def _flatten_children(children) -> tuple:
    if len(children) == 1 and isinstance(children[0], (list, tuple)):
        children = children[0]
    for child in children:
        if not isinstance(child, (Edge, Series, Parallel)):
            raise TypeError(f"not a network node: {child!r}")
    return tuple(children)


def _leaves(node: Node) -> list[Edge]:
    if isinstance(node, Edge):
        return [node]
    out: list[Edge] = []
    for child in node.children:
        out.extend(_leaves(child))
    return out


def _count_paths(node: Node) -> int:
    if isinstance(node, Edge):
        return 1
    counts = [_count_paths(c) for c in node.children]
    return int(np.prod(counts)) if isinstance(node, Series) else sum(counts)


class SPNetwork:
    """A series-parallel network stored as its composition tree.

    Edges are numbered in depth-first leaf order. Unnamed edges get the name
    ``e<index>``. Paths are tuples of edge indices listed from source to sink:
    a series node takes the lexicographic cross product of its children's path
    lists, a parallel node concatenates them in child order.
    """

    def __init__(self, root: Node, path_cap: int = DEFAULT_PATH_CAP):
        self.root = root
        leaves = _leaves(root)
        self.latencies: tuple[Latency, ...] = tuple(e.latency for e in leaves)
        self.edge_names: tuple[str, ...] = tuple(
            e.name if e.name is not None else f"e{i}" for i, e in enumerate(leaves)
        )
        if len(set(self.edge_names)) != len(self.edge_names):
            raise ValueError(f"edge names must be unique: {self.edge_names}")
        n_paths = _count_paths(root)
        if n_paths > path_cap:
            raise PathLimitError(f"{n_paths} paths exceed the cap of {path_cap}")
        self._leaf_index = {id(e): i for i, e in enumerate(leaves)}
        if len(self._leaf_index) != len(leaves):
            raise ValueError("the same Edge object appears twice in the tree")
        self.paths: tuple[tuple[int, ...], ...] = tuple(self._paths(root))
        incidence = np.zeros((len(leaves), len(self.paths)))
        for j, path in enumerate(self.paths):
            incidence[list(path), j] = 1.0
        incidence.flags.writeable = False
        self.incidence = incidence
        self.table = LatencyTable(self.latencies)

    def _paths(self, node: Node) -> list[tuple[int, ...]]:
        if isinstance(node, Edge):
            return [(self._leaf_index[id(node)],)]
        child_paths = [self._paths(c) for c in node.children]
        if isinstance(node, Parallel):
            return [p for paths in child_paths for p in paths]
        return [sum(combo, ()) for combo in product(*child_paths)]

    @property
    def n_edges(self) -> int:
        return len(self.latencies)

    @property
    def n_paths(self) -> int:
        return len(self.paths)

    def path_names(self, index: int) -> tuple[str, ...]:
        return tuple(self.edge_names[e] for e in self.paths[index])

    def realize(self) -> tuple[list[tuple[int, int, int]], int, int]:
        """Explicit multigraph ``(arcs, s, t)`` with arcs ``(tail, head, edge)``.

        Used to cross-check path enumeration against a graph traversal.
        """
        arcs: list[tuple[int, int, int]] = []
        counter = [2]

        def build(node: Node, s: int, t: int) -> None:
            if isinstance(node, Edge):
                arcs.append((s, t, self._leaf_index[id(node)]))
            elif isinstance(node, Parallel):
                for child in node.children:
                    build(child, s, t)
            else:
                cur = s
                for k, child in enumerate(node.children):
                    if k == len(node.children) - 1:
                        nxt = t
                    else:
                        nxt = counter[0]
                        counter[0] += 1
                    build(child, cur, nxt)
                    cur = nxt

        build(self.root, 0, 1)
        return arcs, 0, 1

    def __repr__(self) -> str:
        return f"SPNetwork({self.root!r})"


def single_edge(latency: Latency, name: str | None = None) -> SPNetwork:
    return SPNetwork(Edge(latency, name))


def parallel_network(latencies: Sequence[Latency]) -> SPNetwork:
    if len(latencies) == 1:
        return single_edge(latencies[0])
    return SPNetwork(Parallel(*[Edge(lat) for lat in latencies]))


def enumerate_paths(net: SPNetwork) -> list[tuple[str, ...]]:
    """All s-t paths as tuples of edge names, in the network's fixed order."""
    return [net.path_names(i) for i in range(net.n_paths)]


def _combined(path_flows) -> np.ndarray:
    # accepts a Flow-like object or a plain per-path array
    flows = getattr(path_flows, "path_flows", path_flows)
    return np.asarray(flows, dtype=float)


def edge_flow(net: SPNetwork, path_flows) -> np.ndarray:
    """Edge flows ``x_e = sum of x_p over paths through e``."""
    flows = _combined(path_flows)
    if flows.shape != (net.n_paths,):
        raise ValueError(f"expected {net.n_paths} path flows, got shape {flows.shape}")
    if np.any(flows < 0.0):
        raise ValueError("path flows must be nonnegative")
    return net.incidence @ flows


def _check_path(net: SPNetwork, p: int) -> None:
    if not 0 <= p < net.n_paths:
        raise KeyError(f"unknown path {p}; network has {net.n_paths} paths")


def path_latency(net: SPNetwork, path_flows, p: int) -> float:
    _check_path(net, p)
    xe = edge_flow(net, path_flows)
    return float(sum(evaluate(net.latencies[e], min(xe[e], 1.0)) for e in net.paths[p]))


def path_marginal_cost(net: SPNetwork, path_flows, p: int) -> float:
    _check_path(net, p)
    xe = edge_flow(net, path_flows)
    return float(
        sum(marginal_cost(net.latencies[e], min(xe[e], 1.0)) for e in net.paths[p])
    )


def path_latencies(net: SPNetwork, path_flows) -> np.ndarray:
    """Latency of every path (vectorised)."""
    return net.incidence.T @ net.table.value(net.incidence @ _combined(path_flows))


def path_marginal_costs(net: SPNetwork, path_flows) -> np.ndarray:
    return net.incidence.T @ net.table.marginal(net.incidence @ _combined(path_flows))


def _normalise_paths(paths: Iterable[int], n_paths: int) -> tuple[int, ...]:
    out = tuple(sorted(set(int(p) for p in paths)))
    for p in out:
        if not 0 <= p < n_paths:
            raise ValueError(f"path index {p} out of range for {n_paths} paths")
    return out


@dataclass(frozen=True)
class RoutingGame:
    """Network, per-type accessible path indices and the selfish mass.

    ``altruists_selfish`` marks the homogenized game: altruistic traffic keeps
    its own path set but evaluates paths by latency instead of marginal cost.
    """

    network: SPNetwork
    selfish_paths: tuple[int, ...]
    altruistic_paths: tuple[int, ...]
    r_s: float
    altruists_selfish: bool = field(default=False)

    def __post_init__(self) -> None:
        n = self.network.n_paths
        object.__setattr__(self, "selfish_paths", _normalise_paths(self.selfish_paths, n))
        object.__setattr__(
            self, "altruistic_paths", _normalise_paths(self.altruistic_paths, n)
        )
        r_s = float(self.r_s)
        if not 0.0 <= r_s <= 1.0:
            raise ValueError(f"r_s must lie in [0, 1], got {r_s}")
        object.__setattr__(self, "r_s", r_s)
        if r_s > 0.0 and not self.selfish_paths:
            raise ValueError("selfish traffic has positive mass but no paths")
        if self.r_a > 0.0 and not self.altruistic_paths:
            raise ValueError("altruistic traffic has positive mass but no paths")

    @classmethod
    def full_access(cls, network: SPNetwork, r_s: float) -> RoutingGame:
        every = tuple(range(network.n_paths))
        return cls(network, every, every, r_s)

    @property
    def r_a(self) -> float:
        return 1.0 - self.r_s

    @property
    def all_paths(self) -> tuple[int, ...]:
        return tuple(range(self.network.n_paths))

    def with_r_s(self, r_s: float) -> RoutingGame:
        return replace(self, r_s=r_s)


def homogenize(game: RoutingGame) -> RoutingGame:
    """The same game with every unit of traffic routing on latency."""
    if game.altruists_selfish:
        return game
    return replace(game, altruists_selfish=True)


def game_gamma(game: RoutingGame | SPNetwork) -> float:
    """Largest marginal-cost ratio over the edges with a nonzero latency."""
    net = game.network if isinstance(game, RoutingGame) else game
    positive = [lat for lat in net.latencies if lat.is_positive()]
    if not positive:
        raise ValueError("every edge latency is identically zero")
    return max(gamma_bound(lat) for lat in positive)
