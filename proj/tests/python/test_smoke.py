import math

import eqsim


def test_condition_names():
    names = eqsim.condition_names()
    assert len(names) == 18
    assert "LS" in names
    assert "OTM-reject-biased" in names


def test_trial_counts():
    train = eqsim.generate_training_trials("LS", seed=1)
    assert len(train) == 180
    evals = eqsim.generate_eval_trials("LS")
    kinds = {}
    for t in evals:
        kinds[t["test_kind"]] = kinds.get(t["test_kind"], 0) + 1
    assert kinds == {
        "baseline": 180,
        "reflexivity": 216,
        "symmetry": 180,
        "transitivity": 720,
    }


def test_expected_rates():
    r = eqsim.expected_rates("LS")
    assert math.isclose(r["symmetry"], 1.0 / 3.0, abs_tol=1e-12)
    rb = eqsim.expected_rates("LS-biased")
    assert math.isclose(rb["base"], 1.0, abs_tol=1e-12)
    assert rb["symmetry"] > 0.8


def test_run_cell_probabilistic():
    res = eqsim.run_cell("LS-biased", "probabilistic", seed=1)
    assert res["error"] == ""
    assert math.isclose(res["rates"]["base"], 1.0, abs_tol=1e-12)
    oracle = eqsim.expected_rates("LS-biased")
    assert abs(res["rates"]["symmetry"] - oracle["symmetry"]) < 0.15


def test_simulation_id():
    assert eqsim.simulation_id("LS", "bert") == 1
    assert eqsim.simulation_id("OTM-reject-biased", "probabilistic") == 72


def test_relation_matrix_csv():
    csv = eqsim.relation_matrix_csv("LS", seed=1)
    assert csv.count("S+") == 20
    assert csv.count("S-") == 60
