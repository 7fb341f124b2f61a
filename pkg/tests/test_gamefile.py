from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perversity import gamefile
from perversity.gamefile import GameFileError
from perversity.suite import random_game
from perversity.worstcase import lemma3_instance

PIGOU = {
    "network": {
        "type": "parallel",
        "children": [
            {"type": "edge", "latency": [{"coef": 1, "exp": 1}]},
            {"type": "edge", "latency": [{"coef": 1, "exp": 0}]},
        ],
    },
    "selfish_paths": [0, 1],
    "altruistic_paths": [0, 1],
    "r_s": 1.0,
}


def test_load_pigou(tmp_path):
    path = tmp_path / "pigou.json"
    path.write_text(json.dumps(PIGOU))
    game = gamefile.load(path)
    assert game.network.n_paths == 2
    assert game.r_s == 1.0
    assert game.network.latencies[0].terms == ((1.0, 1.0),)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_roundtrip(seed):
    game = random_game(np.random.default_rng(seed))
    back = gamefile.loads(gamefile.dumps(game))
    assert back.network.paths == game.network.paths
    assert back.network.latencies == game.network.latencies
    assert back.network.edge_names == game.network.edge_names
    assert (back.selfish_paths, back.altruistic_paths, back.r_s) == (
        game.selfish_paths,
        game.altruistic_paths,
        game.r_s,
    )


def test_names_survive_roundtrip(tmp_path):
    game = lemma3_instance(2.0, 0.5)
    path = tmp_path / "l3.json"
    gamefile.dump(game, path)
    assert gamefile.load(path).network.edge_names == ("top", "middle", "bottom")


def test_syntax_error_reports_position():
    with pytest.raises(GameFileError, match=r"line 2, column"):
        gamefile.loads('{"network":\n  }')


def _broken(**changes):
    doc = json.loads(json.dumps(PIGOU))
    for dotted, value in changes.items():
        target = doc
        keys = dotted.split("__")
        for k in keys[:-1]:
            target = target[int(k)] if k.isdigit() else target[k]
        target[keys[-1]] = value
    return json.dumps(doc)


@pytest.mark.parametrize(
    "text, where",
    [
        (_broken(r_s="half"), "r_s"),
        (_broken(r_s=1.5), "game"),
        (_broken(selfish_paths=[0, 5]), "game"),
        (_broken(altruistic_paths="all"), "altruistic_paths"),
        (_broken(network__type="loop"), "network.type"),
        (_broken(network__children=[PIGOU["network"]["children"][0]]), "network.children"),
        (_broken(network__children__0__latency=[{"coef": -1, "exp": 1}]), "network.children[0].latency"),
        (_broken(network__children__0__latency=[{"coef": 1}]), "network.children[0].latency[0]"),
        (_broken(network__children__1__latency=[{"coef": 1, "exp": 0.5}]), "network.children[1].latency"),
        (json.dumps({"network": PIGOU["network"]}), "selfish_paths"),
        ("[1, 2]", "document"),
    ],
)
def test_field_diagnostics(text, where):
    with pytest.raises(GameFileError) as info:
        gamefile.loads(text)
    assert str(info.value).startswith(where)
