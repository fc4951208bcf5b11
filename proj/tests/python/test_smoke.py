import json
import math

import pytest

import larsim


def test_version():
    assert larsim.__version__ == "0.1.0"


def test_hedge_update_matches_direct_computation():
    out = larsim.hedge_update([0.5, 0.5], [1.0, 0.0], 0.5)
    z = math.exp(-0.5)
    assert out[0] == pytest.approx(z / (1.0 + z), rel=1e-15)
    assert sum(out) == pytest.approx(1.0, abs=1e-12)


def test_normalizer_gamma_golden_instance():
    gamma = larsim.solve_normalizer_gamma([0.5, 0.5], 0, 0.5)
    assert gamma == pytest.approx(-1.5 + math.sqrt(1.25), abs=1e-10)
    w = larsim.log_barrier_step([0.5, 0.5], 0, 0.5)
    assert w[0] == pytest.approx(0.3819660112501051, abs=1e-10)
    assert w[1] == pytest.approx(0.6180339887498949, abs=1e-10)


def test_learner_class_round_trip():
    learner = larsim.Learner("hedge", d=3, eta=0.2)
    assert learner.distribution() == pytest.approx([1.0 / 3.0] * 3)
    learner.observe_full([1.0, 0.0, 0.5])
    w = learner.distribution()
    assert w[1] > w[2] > w[0]
    assert learner.round == 2
    learner.reset()
    assert learner.round == 1

    bandit = larsim.Learner("log_barrier_bandit", d=2, eta=0.5)
    bandit.observe_bandit(0, 0.5)
    w = bandit.distribution()
    assert w[0] == pytest.approx(0.438447, abs=1e-6)
    assert sum(w) == pytest.approx(1.0, abs=1e-12)


def test_comparators_and_residual():
    history = [[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
    action, total = larsim.best_fixed_comparator(history)
    assert (action, total) == (1, 1.0)
    actions, shifted_total = larsim.best_shifting_comparator(history, 1)
    assert shifted_total == 0.0
    assert actions == [1, 1, 0]

    budget = larsim.budget_for("hedge", "cost", 2, 3, 0.5)
    assert budget == pytest.approx(math.log(2.0))
    residual = larsim.lar_residual(2.0, 1.0, 0.5, budget)
    assert residual == pytest.approx(0.5 * 2.0 - 1.0 - budget / 0.5)


def test_bound_formulas():
    assert larsim.poa_bound_cost(5.0 / 3.0, 1.0 / 3.0) == pytest.approx(2.5)
    e = math.e
    assert larsim.poa_bound_utility(1.0 - 1.0 / e, 1.0) == pytest.approx(e / (e - 1.0))
    ours = larsim.turnover_threshold(0.1, 0.25, 1.0, 4, 10000, "ours")
    prior = larsim.turnover_threshold(0.1, 0.25, 1.0, 4, 10000, "prior")
    assert ours / prior == 4.0


def test_run_experiment_text_writes_outputs(tmp_path):
    config = {
        "schema_version": 1,
        "kind": "game",
        "game": {"family": "load_balancing", "players": 2, "actions": 2},
        "learners": [{"kind": "hedge", "eta": 0.3}],
        "feedback": "realized",
        "horizon_t": 200,
        "trials": 2,
        "seed": 7,
        "checks": [{"type": "lar_fixed", "epsilon": 0.3}],
    }
    result = larsim.run_experiment_text(json.dumps(config), out_dir=str(tmp_path))
    assert result["exit_code"] == 0
    assert result["checks"] and all(c["passed"] for c in result["checks"])
    report = json.loads(result["report"])
    assert report["schema_version"] == 1
    assert report["all_passed"] is True
    for name in ("trajectory.csv", "report.json", "summary.txt"):
        assert (tmp_path / name).exists()


def test_run_streams_experiment():
    config = {
        "schema_version": 1,
        "kind": "streams",
        "seed": 3,
        "suite": {
            "learner": "hedge",
            "epsilons": [0.2],
            "actions": [4],
            "horizon_t": 2000,
            "streams_per_cell": 4,
            "comparator": "fixed",
        },
    }
    result = larsim.run_experiment_text(json.dumps(config))
    assert result["exit_code"] == 0


def test_config_hash_ignores_comments_and_spacing():
    base = (
        '{"schema_version":1,"kind":"game",'
        '"game":{"family":"load_balancing","players":2,"actions":2},'
        '"learners":[{"kind":"hedge","eta":0.3}],"horizon_t":10}'
    )
    spaced = base.replace(":", " : ").replace(",", " ,\n")
    commented = "// smoke\n" + base
    digest = larsim.config_hash(base)
    assert larsim.config_hash(spaced) == digest
    assert larsim.config_hash(commented) == digest
    assert len(digest) == 16


def test_config_errors_surface_as_value_error():
    with pytest.raises(ValueError, match="invalid experiment config"):
        larsim.run_experiment_text('{"schema_version": 1, "kind": "nope"}')
