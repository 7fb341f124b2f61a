from __future__ import annotations

import numpy as np
import pytest

from perversity.equilibrium import verify_wardrop
from perversity.latency import evaluate, gamma_bound, marginal_cost
from perversity.metrics import pi_theoretical
from perversity.network import game_gamma, homogenize
from perversity.worstcase import (
    lemma3_flows,
    lemma3_instance,
    pigou_instance,
    steep_latency,
    verify_tightness,
)


@pytest.mark.parametrize("gamma", [1.0, 1.3, 2.0, 2.5, 7.0])
@pytest.mark.parametrize("r", [0.5, 0.8, 1.0])
def test_steep_latency_point_conditions(gamma, r):
    f = steep_latency(gamma, r)
    assert evaluate(f, r) == pytest.approx(1.0, abs=1e-12)
    assert marginal_cost(f, r) == pytest.approx(gamma, abs=1e-12)


@pytest.mark.parametrize("gamma", [2.0, 3.0, 5.0, 10.0])
def test_steep_latency_class_membership(gamma):
    # for gamma >= 2 the instance stays inside the gamma class
    assert game_gamma(lemma3_instance(gamma, 0.3)) == pytest.approx(gamma, abs=1e-9)


def test_steep_latency_below_two_exceeds_gamma_beyond_r():
    # documented limitation: a convex function cannot keep the ratio at gamma
    f = steep_latency(1.5, 0.6)
    assert gamma_bound(f) > 1.5


def test_steep_latency_domain():
    with pytest.raises(ValueError):
        steep_latency(0.9, 0.5)
    with pytest.raises(ValueError):
        steep_latency(2.0, 0.0)


def test_instance_layout():
    game = lemma3_instance(3.0, 0.25)
    assert game.selfish_paths == (0, 1, 2)
    assert game.altruistic_paths == (0, 1)
    assert game.network.edge_names == ("top", "middle", "bottom")
    with pytest.raises(ValueError):
        lemma3_instance(2.0, 1.5)


@pytest.mark.parametrize("gamma", [1.5, 2.0, 5.0])
@pytest.mark.parametrize("r_s", [0.0, 0.3, 0.5, 0.65, 1.0])
def test_hand_flows_realise_the_bound(gamma, r_s):
    game = lemma3_instance(gamma, r_s)
    hetero, homog = lemma3_flows(gamma, r_s)
    assert verify_wardrop(game, hetero).ok
    assert verify_wardrop(homogenize(game), homog).ok
    xe, xbar = hetero.edge_flows(game.network), homog.edge_flows(game.network)
    L = float(xe @ game.network.table.value(xe))
    Lbar = float(xbar @ game.network.table.value(xbar))
    assert Lbar == pytest.approx(1.0)
    assert L / Lbar == pytest.approx(pi_theoretical(gamma, r_s), abs=1e-12)


def test_tightness_report():
    rep = verify_tightness(2.0, 0.5)
    assert rep.ok
    assert rep.empirical_pi == pytest.approx(1.5, abs=1e-9)
    hetero, _ = lemma3_flows(2.0, 0.5)
    assert rep.heterogeneous_flow.distance(hetero) < 1e-8


def test_pigou_instance():
    game = pigou_instance(3, r_s=0.4)
    assert game.network.n_paths == 2
    assert game.selfish_paths == game.altruistic_paths == (0, 1)
    with pytest.raises(ValueError):
        pigou_instance(0)
    np.testing.assert_allclose(game.network.table.exps[:, 0], [3.0, 0.0])
