import os
from pathlib import Path

import pytest

import aspir

FIXTURES = Path(os.environ.get("ASPIR_FIXTURES", Path(__file__).resolve().parents[1] / "fixtures"))


def test_even_loop_has_two_answer_sets():
    assert aspir.answer_sets("a :- not b. b :- not a.") == [["a"], ["b"]]
    assert aspir.answer_sets("a :- not b. b :- not a.", mode="oracle") == [["a"], ["b"]]


def test_facts_and_nonground_rules():
    assert aspir.answer_sets("q(X) :- p(X).", facts=["p(1)"]) == [["p(1)", "q(1)"]]


def test_normalize_round_trip():
    assert aspir.normalize("p(X) | q(X) :- d(X).") == "p(X) v q(X) :- d(X).\n"
    with pytest.raises(aspir.ParseError):
        aspir.normalize("a :- b")


def test_meta_check():
    assert aspir.is_inconsistent_meta("a :- not a.")
    assert not aspir.is_inconsistent_meta("a :- not b. b :- not a.")


def test_explain_agrees_across_backends():
    program = ":- a, not c. d :- b."
    assert aspir.explain(program, ["a", "b", "c"], ["a"]) == [(["a"], ["c"])]
    tau = aspir.explain(program, ["a", "b", "c"], via="tau")
    assert tau == aspir.explain(program, ["a", "b", "c"], via="bruteforce")
    assert (["a"], ["c"]) in tau


def test_chain_modes_agree_on_committee():
    program = (FIXTURES / "committee.lp").read_text()
    tables = (FIXTURES / "committee_tables.json").read_text()
    split = aspir.evaluate_chain(program, "split", tables)
    tuprop = aspir.evaluate_chain(program, "tuprop", tables)
    assert len(split["answer_sets"]) == 20
    assert split["answer_sets"] == tuprop["answer_sets"]
    assert tuprop["learned"]
    assert tuprop["units"][1]["solves"] < split["units"][1]["solves"]


def test_bench_csv():
    csv = aspir.bench_csv("setguess", [3], modes=["split"])
    assert csv.splitlines()[1].startswith("setguess,3,1,split,2,9,9,")


def test_unknown_mode_raises():
    with pytest.raises(aspir.Error):
        aspir.answer_sets("a.", mode="fast")
