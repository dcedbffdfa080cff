import json

import numpy as np
import pytest
from conftest import random_graph

from udlab.errors import BudgetExceeded
from udlab.graph import (
    Graph,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    disjoint_union,
    moser_spindle,
    path_graph,
    star_graph,
)
from udlab.realize import (
    YES_KINDS,
    Answer,
    Certificate,
    Kind,
    Verdict,
    decide,
    decide_1d,
    decide_1d_oracle,
    find_k23,
    validate_certificate,
)
from udlab.solvers import find_clique


@pytest.mark.parametrize(
    "g, answer, kind",
    [
        (path_graph(5), Answer.YES, Kind.LINEAR_FOREST),
        (cycle_graph(4), Answer.NO, Kind.CYCLE_1D),
        (star_graph(3), Answer.NO, Kind.HIGH_DEGREE_1D),
        (Graph(4), Answer.YES, Kind.LINEAR_FOREST),
    ],
)
def test_decide_1d_examples(g, answer, kind):
    v = decide_1d(g)
    assert v.answer == answer and v.certificate.kind == kind
    assert validate_certificate(g, v)


def test_oracle_examples():
    v = decide_1d_oracle(path_graph(5))
    assert v.answer == Answer.YES
    labels = v.certificate.witness
    assert sorted(labels) == [0, 1, 2, 3, 4] or sorted(labels) == [-4, -3, -2, -1, 0]
    assert decide_1d_oracle(cycle_graph(6)).answer == Answer.NO
    with pytest.raises(BudgetExceeded):
        decide_1d_oracle(path_graph(13))


def test_decide_1d_agrees_with_oracle_seven_vertices(graphs7):
    bad = [g.edge_list() for g in graphs7 if decide_1d(g).answer != decide_1d_oracle(g).answer]
    assert bad == []


def test_decide_1d_agrees_with_oracle_random():
    rng = np.random.default_rng(2)
    for _ in range(500):
        g = random_graph(rng, int(rng.integers(1, 13)), p=rng.uniform(0.02, 0.4))
        assert decide_1d(g).answer == decide_1d_oracle(g).answer


@pytest.mark.parametrize(
    "g, d, answer, kind, name",
    [
        (disjoint_union(cycle_graph(5), path_graph(3)), 2, Answer.YES, Kind.TREE_UNICYCLIC, None),
        (complete_graph(4), 2, Answer.NO, Kind.FORBIDDEN_SUBGRAPH, "K4"),
        (complete_bipartite(2, 3), 2, Answer.NO, Kind.FORBIDDEN_SUBGRAPH, "K2,3"),
        (moser_spindle(), 2, Answer.YES, Kind.NUMERICAL_EMBEDDING, None),
        (complete_graph(5), 3, Answer.NO, Kind.FORBIDDEN_SUBGRAPH, "K5"),
        (complete_bipartite(2, 3), 3, Answer.YES, Kind.NUMERICAL_EMBEDDING, None),
    ],
)
def test_decide_examples(g, d, answer, kind, name):
    v = decide(g, d, budget=200)
    assert v.answer == answer and v.certificate.kind == kind
    assert v.certificate.name == name
    assert validate_certificate(g, v)


def test_find_k23_is_subgraph_not_induced():
    # K_{2,3} plus an edge inside the small side still contains K_{2,3}
    g = Graph(5, complete_bipartite(2, 3).edge_list() + [(0, 1)])
    w = find_k23(g)
    assert w is not None
    a1, a2, *bs = w
    assert all(g.has_edge(a, b) for a in (a1, a2) for b in bs)
    assert find_k23(cycle_graph(8)) is None


def test_forged_certificates_rejected():
    c4 = cycle_graph(4)
    forged = Verdict(Answer.YES, 1, Certificate(Kind.LINEAR_FOREST, [0, 1, 2, 3]))
    assert not validate_certificate(c4, forged)
    assert validate_certificate(complete_graph(4), Verdict(Answer.NO, 2, Certificate(Kind.FORBIDDEN_SUBGRAPH, [0, 1, 2, 3], name="K4")))
    assert not validate_certificate(cycle_graph(4), Verdict(Answer.NO, 2, Certificate(Kind.FORBIDDEN_SUBGRAPH, [0, 1, 2, 3], name="K4")))
    bad_pts = Verdict(Answer.YES, 2, Certificate(Kind.NUMERICAL_EMBEDDING, [[0, 0], [2, 0]]))
    assert not validate_certificate(path_graph(2), bad_pts)
    coincident = Verdict(Answer.YES, 2, Certificate(Kind.NUMERICAL_EMBEDDING, [[0, 0], [1, 0], [0, 0]]))
    assert not validate_certificate(path_graph(3), coincident)
    garbage = Verdict(Answer.NO, 2, Certificate(Kind.FORBIDDEN_SUBGRAPH, ["a", None], name="K4"))
    assert not validate_certificate(complete_graph(4), garbage)
    assert not validate_certificate(complete_graph(4), Verdict(Answer.UNKNOWN, 2))


def test_verdict_requires_certificate_iff_decided():
    with pytest.raises(ValueError):
        Verdict(Answer.YES, 2)
    with pytest.raises(ValueError):
        Verdict(Answer.UNKNOWN, 2, Certificate(Kind.TREE_UNICYCLIC))


@pytest.mark.parametrize("g, d", [(moser_spindle(), 2), (complete_bipartite(2, 3), 2), (star_graph(3), 1), (cycle_graph(5), 2)])
def test_json_round_trip(g, d):
    v = decide(g, d)
    text = v.to_json()
    body = json.loads(text)
    assert set(body) == {"answer", "certificate", "dimension"}
    assert {"kind", "witness"} <= set(body["certificate"])
    back = Verdict.from_json(text)
    assert back.to_json() == text
    assert validate_certificate(g, back)


def test_unknown_serializes_without_certificate():
    v = Verdict(Answer.UNKNOWN, 2)
    assert json.loads(v.to_json()) == {"answer": "UNKNOWN", "certificate": None, "dimension": 2}


def test_monotone_under_edge_deletion():
    rng = np.random.default_rng(8)
    checked = 0
    for _ in range(400):
        g = random_graph(rng, int(rng.integers(4, 11)), p=rng.uniform(0.15, 0.45))
        d = int(rng.integers(2, 4))
        v = decide(g, d, budget=50)
        if v.answer != Answer.YES:
            continue
        edges = g.edge_list()
        for _ in range(3):
            keep = [e for e in edges if rng.random() < 0.7]
            sub = Graph(g.n, keep)
            w = decide(sub, d, budget=50)
            assert w.answer == Answer.YES, (edges, keep, d)
            assert validate_certificate(sub, w)
        checked += 1
    assert checked > 50


def _candidate_certificates(g, d):
    yes = [Verdict(Answer.YES, d, Certificate(Kind.TREE_UNICYCLIC))]
    if d == 1:
        yes.append(Verdict(Answer.YES, d, Certificate(Kind.LINEAR_FOREST)))
    no = []
    clique = find_clique(g, d + 2)
    if clique is not None:
        no.append(Verdict(Answer.NO, d, Certificate(Kind.FORBIDDEN_SUBGRAPH, list(clique), name=f"K{d + 2}")))
    w = find_k23(g)
    if w is not None:
        no.append(Verdict(Answer.NO, d, Certificate(Kind.FORBIDDEN_SUBGRAPH, list(w), name="K2,3")))
    return yes, no


def test_yes_and_no_never_both_validate():
    rng = np.random.default_rng(10)
    decided = 0
    for _ in range(10_000):
        g = random_graph(rng, int(rng.integers(1, 13)), p=rng.uniform(0.05, 0.7))
        d = int(rng.integers(2, 4))
        v = decide(g, d, budget=2)
        yes, no = _candidate_certificates(g, d)
        if v.answer != Answer.UNKNOWN:
            assert validate_certificate(g, v)
            decided += 1
            (yes if v.certificate.kind in YES_KINDS else no).append(v)
        assert not (any(validate_certificate(g, y) for y in yes) and any(validate_certificate(g, x) for x in no))
    assert decided > 9000
