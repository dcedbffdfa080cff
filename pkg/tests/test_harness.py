import csv
import io
import json
import math

import numpy as np
import pytest

from udlab.errors import InvalidInput, NonMonotoneSignal
from udlab.harness import (
    CURVE_COLUMNS,
    ProbabilityEstimate,
    _trial_edges,
    curve_csv,
    estimate_probability,
    find_threshold,
    reference_table,
    to_json,
    u_regime_experiment,
    wilson_interval,
)
from udlab.realize import Answer
from udlab.rng import trial_graph


def test_trivial_probabilities():
    assert estimate_probability(10, 0.0, 100).frac_yes == 1.0
    assert estimate_probability(10, 1.0, 100).frac_no == 1.0


@pytest.mark.parametrize("p", [0.001, 0.01, 0.05])
@pytest.mark.parametrize("decider, d", [("1d_exact", 1), ("pipeline", 2), ("pipeline", 3)])
def test_count_conservation(p, decider, d):
    # a tiny embedder budget: this checks bookkeeping, not embedding power
    e = estimate_probability(40, p, 60, decider, d, seed=3, budget=2)
    assert e.yes + e.no + e.unknown == e.trials == 60
    assert e.frac_yes + e.frac_no + e.frac_unknown == pytest.approx(1.0)
    lo, hi = e.bounds
    assert lo <= hi


def test_trial_edges_match_sampler():
    for i in range(10):
        eu, ev = _trial_edges(50, 0.1, 4, i)
        assert sorted(zip(eu.tolist(), ev.tolist())) == trial_graph(50, 0.1, 4, i).edge_list()


def test_coupling_monotone_exactly():
    n, seed, trials = 128, 9, 300
    ps = [0.5 / n ** (4 / 3) * 1.3 ** j for j in range(12)]
    fr = [estimate_probability(n, p, trials, seed=seed).frac_yes for p in ps]
    assert all(a >= b for a, b in zip(fr, fr[1:]))
    assert fr[0] > fr[-1]


def test_serial_parallel_identical():
    a = estimate_probability(300, 1 / 300, 200, "pipeline", 2, seed=1, workers=1)
    b = estimate_probability(300, 1 / 300, 200, "pipeline", 2, seed=1, workers=3)
    assert to_json(a) == to_json(b)


def test_wilson_interval():
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi and hi - lo == pytest.approx(0.192, abs=1e-3)
    assert wilson_interval(0, 20)[0] == 0.0 and wilson_interval(20, 20)[1] == 1.0


def test_subcritical_plane():
    e = estimate_probability(1000, 0.5 / 1000, 200, "pipeline", 2, seed=0)
    assert e.frac_yes >= 0.9


def _always_yes(g, d):
    return Answer.YES


def test_always_yes_threshold_degenerate():
    th = find_threshold(64, _always_yes, trials=50)
    assert th.p_star_hat == 1.0 and th.degenerate
    th = find_threshold(64, "always_yes", trials=50)
    assert th.degenerate and th.p_lo == th.p_hi == 1.0


def test_threshold_bracket_invariant():
    th = find_threshold(128, "1d_exact", trials=400, tol=0.02, seed=2)
    assert th.p_hi - th.p_lo <= 0.02 * th.p_hi
    assert not th.degenerate
    at_lo = [pr for pr in th.probes if pr.p == th.p_lo]
    at_hi = [pr for pr in th.probes if pr.p == th.p_hi]
    assert at_lo and at_lo[0].frac_yes > 0.5
    assert at_hi and at_hi[0].frac_yes <= 0.5
    assert th.scaled_constant == pytest.approx(th.p_star_hat * 128 ** (4 / 3))


def _banded(g, d):
    # YES for no edges or a middle band of edge counts: P(YES) rises after dipping
    return Answer.YES if g.m == 0 or 10 <= g.m <= 60 else Answer.NO


def test_non_monotone_signal():
    with pytest.raises(NonMonotoneSignal):
        find_threshold(64, _banded, trials=400)


def test_pipeline_threshold_is_lower_bound():
    th = find_threshold(30, "pipeline", trials=30, tol=0.15, d=2, budget=1)
    assert th.lower_bound and th.scaling == "n" and not th.degenerate
    assert 0.5 < th.scaled_constant < 20


def test_bad_inputs():
    with pytest.raises(InvalidInput):
        estimate_probability(10, 1.5, 10)
    with pytest.raises(InvalidInput):
        estimate_probability(10, 0.5, 10, "magic")
    with pytest.raises(InvalidInput):
        estimate_probability(10, 0.5, 10, "1d_exact", d=2)


def test_curve_csv_format():
    ests = [estimate_probability(50, p, 40, seed=1) for p in (0.001, 0.01)]
    text = curve_csv(ests, {"n": 50, "seed": 1})
    head, body = text.split("\n", 1)
    assert head.startswith("# config: ") and json.loads(head[len("# config: "):]) == {"n": 50, "seed": 1}
    rows = list(csv.reader(io.StringIO(body)))
    assert tuple(rows[0]) == CURVE_COLUMNS and len(rows) == 3
    for row, e in zip(rows[1:], ests):
        assert float(row[2]) == e.frac_yes and float(row[5]) == e.ci_yes[0]


def test_probability_json_fields():
    body = json.loads(to_json(estimate_probability(20, 0.1, 30, seed=4)))
    for key in ("n", "p", "trials", "frac_yes", "frac_no", "frac_unknown", "ci_yes", "ci_no", "ci_unknown", "decider", "seed"):
        assert key in body


def test_u_regime_small():
    r = u_regime_experiment(30, 0.5, 2, 6, seed=2)
    assert sum(r.histogram.values()) == 6 and r.exact
    assert r.mode in r.histogram and r.bounds["L1"] == pytest.approx(2 * math.log2(15))
    r2 = u_regime_experiment(30, 0.5, 2, 6, seed=2, workers=2)
    assert to_json(r) == to_json(r2)


def test_reference_table():
    t = reference_table()
    assert t.t0 == 14.797 and t.c(8) == 8675.785 and t.c(3) == 55.272
    assert t.one_d["exact"] == pytest.approx((6 * math.log(2)) ** (1 / 3))
    assert t.one_d["lower"] == pytest.approx(1.442, abs=1e-3) and t.one_d["upper"] == pytest.approx(2.289, abs=1e-3)
    assert t.kappa == 4.36
    assert set(t.to_dict()["citations"]) == {"t0", "c_d", "one_d", "kappa"}
