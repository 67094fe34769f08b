import math
import os

import pytest

import secgame

FIXTURES = os.environ.get("SECGAME_FIXTURE_DIR", "fixtures")


def fixture(name):
    return os.path.join(FIXTURES, name)


def test_scalar_model_pipeline():
    model = secgame.load_model(fixture("scalar.json"))
    assert model.num_states == 1
    assert model.num_nodes == 1

    synth = secgame.synth_unstructured(model)
    assert synth.converged
    assert synth.K[0, 0] == pytest.approx(math.sqrt(2.0) - 1.0, abs=1e-6)
    assert synth.J == pytest.approx(math.sqrt(2.0) - 1.0, rel=1e-6)

    table = secgame.build_loss_table(model)
    assert table.n == 1
    assert table.delta(1) == 0.0
    assert table.delta(0) == pytest.approx(0.5 - synth.J, rel=1e-6)


def test_solve_cbbi():
    model = secgame.load_model(fixture("three_node.json"))
    table = secgame.build_loss_table(model, jobs=2)
    assert secgame.importance_ranking(table) == sorted(
        range(1, 4), key=lambda k: -table.delta(0b111 & ~(1 << (k - 1)))
    )

    config = secgame.GameConfig()
    config.n = 3
    config.level_count_attacker = 2
    config.level_count_defender = 2
    config.gamma_a = [0.6] * 3
    config.gamma_d = [1.2] * 3

    result = secgame.solve_cbbi(config, table)
    assert result.attacker_payoff >= 0.0
    assert result.defender_payoff == pytest.approx(-result.attacker_payoff)
    assert len(result.attacker_strategy.levels) == 3

    # Cheap full protection drives the payoff to zero.
    config.gamma_d = [0.2] * 3
    protected = secgame.solve_cbbi(config, table)
    assert protected.attacker_payoff == 0.0
    assert protected.defender_strategy.levels == [1.0] * 3


def test_robust_game():
    model_set = secgame.load_model_set(fixture("three_node_set.json"))
    assert model_set.size == 3
    tables = secgame.build_model_set_tables(model_set, jobs=2)

    config = secgame.GameConfig()
    config.n = 3
    config.level_count_attacker = 2
    config.level_count_defender = 2
    config.gamma_a = [0.6] * 3
    config.gamma_d = [1.2] * 3

    avg = secgame.solve_average_game(tables, config)
    assert avg.attacker_payoff >= 0.0
    assert secgame.nominal_mismatch(tables, config, 0, 0) == 0.0

    report = secgame.mismatch_statistics(tables, [(0.6, 1.2)], config, 0)
    assert report.nominal.min >= 0.0
    assert report.nominal.q1 <= report.nominal.q3


def test_invalid_model_raises():
    with pytest.raises(secgame.SecgameError):
        secgame.load_model(fixture("does_not_exist.json"))
