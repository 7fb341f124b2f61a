"""JSON game files.

A game file mirrors the composition tree::

    {
      "network": {"type": "parallel", "children": [
          {"type": "edge", "latency": [{"coef": 1, "exp": 1}]},
          {"type": "edge", "latency": [{"coef": 1, "exp": 0}]}
      ]},
      "selfish_paths": [0, 1],
      "altruistic_paths": [0, 1],
      "r_s": 1.0
    }

Edges may carry an optional ``"name"``. Path indices follow the network's
enumeration order: a parallel node lists its children's paths in child order,
a series node takes the lexicographic cross product (the first child varies
slowest).
"""

from __future__ import annotations

import json
from pathlib import Path

from .latency import Latency
from .network import Edge, Node, Parallel, RoutingGame, Series, SPNetwork


class GameFileError(ValueError):
    """Malformed game file; the message names the offending field."""


def _fail(where: str, msg: str):
    raise GameFileError(f"{where}: {msg}")


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(where, f"expected a number, got {value!r}")
    return float(value)


def _parse_latency(spec, where: str) -> Latency:
    if not isinstance(spec, list) or not spec:
        _fail(where, "latency must be a nonempty list of {coef, exp} records")
    terms = []
    for i, term in enumerate(spec):
        here = f"{where}[{i}]"
        if not isinstance(term, dict) or set(term) != {"coef", "exp"}:
            _fail(here, f"expected {{'coef': ..., 'exp': ...}}, got {term!r}")
        terms.append((_number(term["coef"], here + ".coef"), _number(term["exp"], here + ".exp")))
    try:
        return Latency(tuple(terms))
    except ValueError as exc:
        _fail(where, str(exc))


def _parse_node(spec, where: str) -> Node:
    if not isinstance(spec, dict):
        _fail(where, f"expected an object, got {spec!r}")
    kind = spec.get("type")
    if kind == "edge":
        name = spec.get("name")
        if name is not None and not isinstance(name, str):
            _fail(where + ".name", "edge name must be a string")
        return Edge(_parse_latency(spec.get("latency"), where + ".latency"), name)
    if kind in ("series", "parallel"):
        children = spec.get("children")
        if not isinstance(children, list) or len(children) < 2:
            _fail(where + ".children", "needs a list of at least two nodes")
        nodes = [_parse_node(c, f"{where}.children[{i}]") for i, c in enumerate(children)]
        return Series(*nodes) if kind == "series" else Parallel(*nodes)
    _fail(where + ".type", f"expected 'edge', 'series' or 'parallel', got {kind!r}")


def _parse_paths(value, where: str) -> list[int]:
    if not isinstance(value, list) or not all(
        isinstance(p, int) and not isinstance(p, bool) for p in value
    ):
        _fail(where, f"expected a list of path indices, got {value!r}")
    return value


def game_from_dict(doc: dict) -> RoutingGame:
    if not isinstance(doc, dict):
        _fail("document", "top level must be an object")
    for key in ("network", "selfish_paths", "altruistic_paths", "r_s"):
        if key not in doc:
            _fail(key, "missing field")
    try:
        net = SPNetwork(_parse_node(doc["network"], "network"))
    except GameFileError:
        raise
    except (ValueError, RuntimeError) as exc:
        _fail("network", str(exc))
    selfish = _parse_paths(doc["selfish_paths"], "selfish_paths")
    altruistic = _parse_paths(doc["altruistic_paths"], "altruistic_paths")
    r_s = _number(doc["r_s"], "r_s")
    try:
        return RoutingGame(net, tuple(selfish), tuple(altruistic), r_s)
    except ValueError as exc:
        _fail("game", str(exc))


def loads(text: str) -> RoutingGame:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameFileError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return game_from_dict(doc)


def load(path: str | Path) -> RoutingGame:
    return loads(Path(path).read_text())


def _node_to_dict(net: SPNetwork, node: Node) -> dict:
    if isinstance(node, Edge):
        out = {
            "type": "edge",
            "latency": [{"coef": c, "exp": q} for c, q in node.latency.terms],
        }
        if node.name is not None:
            out["name"] = node.name
        return out
    kind = "series" if isinstance(node, Series) else "parallel"
    return {"type": kind, "children": [_node_to_dict(net, c) for c in node.children]}


def game_to_dict(game: RoutingGame) -> dict:
    """Serialisable form; the homogenized flag is not part of the format."""
    return {
        "network": _node_to_dict(game.network, game.network.root),
        "selfish_paths": list(game.selfish_paths),
        "altruistic_paths": list(game.altruistic_paths),
        "r_s": game.r_s,
    }


def dumps(game: RoutingGame) -> str:
    return json.dumps(game_to_dict(game), indent=2)


def dump(game: RoutingGame, path: str | Path) -> None:
    Path(path).write_text(dumps(game) + "\n")
