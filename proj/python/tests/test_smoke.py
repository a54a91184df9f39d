import json
import pathlib

import pytest

dp = pytest.importorskip("decision_partition")

DATA = pathlib.Path(__file__).resolve().parents[2] / "data"


def cycle():
    return {"carrier": ["a", "b", "c"], "kind": "relative", "pairs": [["a", "b"], ["b", "c"], ["c", "a"]]}


def test_nearest_preorder_of_a_cycle():
    out = dp.nearest_preorder(cycle())
    assert out["distance"] == 2
    assert len(out["levels"]) == 3
    assert dp.nearest_preorder(json.dumps(cycle()), exact=False)["distance"] >= 2


def test_rank_two_classes():
    rel = {"carrier": ["a", "b", "c"], "kind": "relative", "pairs": [["a", "b"], ["b", "c"], ["a", "c"]]}
    assert dp.rank(rel)["rendered"] == "a ≻ b ≻ c"
    assert dp.rank(rel, 2)["rendered"].startswith("a ≻ ")


def test_cover_fixture():
    text = (DATA / "fixtures" / "geo20.txt").read_text()
    expected = json.loads((DATA / "fixtures" / "expected.json").read_text())
    exact = dp.cover(text)
    assert exact["openings"] == expected["geo20"]["optimum_openings"]
    assert exact["coverage"] == 20
    assert dp.cover(text, "greedy")["openings"] >= exact["openings"]


def test_alice_orders():
    out = dp.alice()
    assert out["orders"]["a+"] == "sb ≻ s¬b ≻ ¬s"
    assert out["aggregate"].startswith("¬s")
    assert out["ok"]
    assert dp.alice(with_sw=True)["orders"]["¬a"] == "¬s ≻ sw ≻ s¬b ≻ sb"


def test_validate_and_errors():
    assert dp.validate((DATA / "models" / "p5.model.json").read_text())["covering"]["districts"] == 5
    with pytest.raises(dp.DecisionError, match="NoDecisionProblem"):
        dp.validate((DATA / "models" / "no_separable.model.json").read_text())
    with pytest.raises(dp.DecisionError):
        dp.cover("1 0\n0 1\n", "simplex")


def test_replay_housing_transcript():
    model = (DATA / "models" / "housing.model.json").read_text()
    transcript = (DATA / "models" / "housing.transcript.json").read_text()
    session = dp.replay(model, transcript)
    assert session["status"] == "satisfied"
    assert len(session["history"]) == 2
    assert session == dp.replay(model, transcript)
