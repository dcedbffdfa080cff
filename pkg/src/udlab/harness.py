"""Monte Carlo experiments: probability estimates, threshold search, u_d regimes.

Every trial ``i`` draws its graph from ``seed_sequence(seed, i)``, so results
do not depend on how trials are split across worker processes, and the same
trial index at two edge probabilities sees coupled graphs (nested edge sets).
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .diameter import estimate_u, histogram, regime_spec, theoretical_u_bounds
from .errors import InvalidInput, NonMonotoneSignal
from .graph import Graph, complete_graph
from .realize import Answer, decide, linear_forest_kernel
from .rng import EdgeStream, pair_from_index, seed_sequence

Z95 = 1.959963984540054
DECIDERS = ("1d_exact", "pipeline", "always_yes")
PIPELINE_BUDGET = 10
_DIAG_STREAM = 11


def wilson_interval(k: int, n: int, z: float = Z95) -> tuple:
    if n == 0:
        return (0.0, 1.0)
    ph = k / n
    denom = 1.0 + z * z / n
    centre = (ph + z * z / (2 * n)) / denom
    half = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, centre - half), min(1.0, centre + half))


# ---------------------------------------------------------------------------
# trials
# ---------------------------------------------------------------------------

def _trial_edges(n: int, p: float, seed: int, i: int):
    if p >= 1.0:
        eu, ev = np.triu_indices(n, 1)
        return eu.astype(np.int64), ev.astype(np.int64)
    idx, _ = EdgeStream(n, seed_sequence(seed, i)).prefix_below(p)
    if idx.shape[0] == 0:
        z = np.zeros(0, dtype=np.int64)
        return z, z
    return pair_from_index(idx, n)


def _trial_answer(n, p, seed, i, decider, d, budget=PIPELINE_BUDGET) -> Answer:
    if decider == "always_yes":
        return Answer.YES
    eu, ev = _trial_edges(n, p, seed, i)
    if decider == "1d_exact":
        status, _, _ = linear_forest_kernel(n, eu, ev)
        return Answer.YES if status == 0 else Answer.NO
    g = Graph(n, np.column_stack([eu, ev])) if eu.shape[0] else Graph(n)
    if decider == "pipeline":
        emb_seed = int(seed_sequence(seed, i, _DIAG_STREAM).generate_state(1)[0])
        return decide(g, d, budget=budget, seed=emb_seed).answer
    return Answer(decider(g, d))


def _count_chunk(args) -> tuple:
    n, p, seed, start, stop, decider, d, budget = args
    yes = no = unk = 0
    for i in range(start, stop):
        a = _trial_answer(n, p, seed, i, decider, d, budget)
        if a is Answer.YES:
            yes += 1
        elif a is Answer.NO:
            no += 1
        else:
            unk += 1
    return yes, no, unk


def _chunks(start: int, stop: int, workers: int):
    size = max(1, math.ceil((stop - start) / (4 * max(1, workers))))
    return [(s, min(stop, s + size)) for s in range(start, stop, size)]


def _map(fn, jobs, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _check_decider(decider, d: int) -> str:
    if callable(decider):
        return getattr(decider, "__name__", "callable")
    if decider not in DECIDERS:
        raise InvalidInput(f"unknown decider {decider!r}; choose from {DECIDERS}")
    if decider == "1d_exact" and d != 1:
        raise InvalidInput("the exact decider works on the line only (d = 1)")
    if decider == "pipeline" and d < 1:
        raise InvalidInput("dimension must be positive")
    return decider


# ---------------------------------------------------------------------------
# probability estimates
# ---------------------------------------------------------------------------

@dataclass
class ProbabilityEstimate:
    n: int
    p: float
    trials: int
    yes: int
    no: int
    unknown: int
    decider: str
    d: int
    seed: int

    @property
    def frac_yes(self) -> float:
        return self.yes / self.trials if self.trials else 0.0

    @property
    def frac_no(self) -> float:
        return self.no / self.trials if self.trials else 0.0

    @property
    def frac_unknown(self) -> float:
        return self.unknown / self.trials if self.trials else 0.0

    @property
    def ci_yes(self) -> tuple:
        return wilson_interval(self.yes, self.trials)

    @property
    def ci_no(self) -> tuple:
        return wilson_interval(self.no, self.trials)

    @property
    def ci_unknown(self) -> tuple:
        return wilson_interval(self.unknown, self.trials)

    @property
    def bounds(self) -> tuple:
        """Bracket on the true realizability probability."""
        return (self.frac_yes, 1.0 - self.frac_no)

    def merge(self, other: "ProbabilityEstimate") -> "ProbabilityEstimate":
        return ProbabilityEstimate(self.n, self.p, self.trials + other.trials, self.yes + other.yes,
                                   self.no + other.no, self.unknown + other.unknown,
                                   self.decider, self.d, self.seed)

    def to_dict(self) -> dict:
        out = asdict(self)
        out.update(
            frac_yes=self.frac_yes, frac_no=self.frac_no, frac_unknown=self.frac_unknown,
            ci_yes=list(self.ci_yes), ci_no=list(self.ci_no), ci_unknown=list(self.ci_unknown),
            bounds=list(self.bounds),
        )
        return out


def _estimate_range(n, p, start, stop, decider, d, seed, workers, budget=PIPELINE_BUDGET) -> ProbabilityEstimate:
    name = _check_decider(decider, d)
    jobs = [(n, p, seed, a, b, decider, d, budget) for a, b in _chunks(start, stop, workers)]
    counts = _map(_count_chunk, jobs, workers)
    yes = sum(c[0] for c in counts)
    no = sum(c[1] for c in counts)
    unk = sum(c[2] for c in counts)
    return ProbabilityEstimate(n, float(p), stop - start, yes, no, unk, name, d, seed)


def estimate_probability(
    n: int,
    p: float,
    trials: int,
    decider: Union[str, Callable] = "1d_exact",
    d: int = 1,
    seed: int = 0,
    workers: int = 1,
    budget: int = PIPELINE_BUDGET,
) -> ProbabilityEstimate:
    """Tally YES/NO/UNKNOWN answers of ``decider`` on ``trials`` samples of G(n, p).

    A callable decider receives ``(graph, d)`` and returns an ``Answer`` (or its
    string value); with ``workers > 1`` it must be picklable.  ``budget`` is
    the embedder restart count used by the pipeline decider.
    """
    if n < 0 or trials < 0:
        raise InvalidInput("n and trials must be non-negative")
    if not 0.0 <= p <= 1.0:
        raise InvalidInput(f"edge probability must lie in [0, 1], got {p}")
    return _estimate_range(n, p, 0, trials, decider, d, seed, workers, budget)


# ---------------------------------------------------------------------------
# threshold search
# ---------------------------------------------------------------------------

@dataclass
class ThresholdEstimate:
    n: int
    p_star_hat: float
    p_lo: float
    p_hi: float
    scaled_constant: float
    scaling: str
    trials: int
    tol: float
    decider: str
    d: int
    seed: int
    degenerate: bool = False
    lower_bound: bool = False
    probes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["probes"] = [pr.to_dict() for pr in self.probes]
        return out


def scaled(p: float, n: int, d: int) -> tuple:
    if d == 1:
        return p * n ** (4.0 / 3.0), "n^(4/3)"
    return p * n, "n"


def find_threshold(
    n: int,
    decider: Union[str, Callable] = "1d_exact",
    trials: int = 2000,
    tol: float = 0.01,
    seed: int = 0,
    d: int = 1,
    workers: int = 1,
    max_extend: int = 4,
    p_min: Optional[float] = None,
    budget: int = PIPELINE_BUDGET,
) -> ThresholdEstimate:
    """Geometric bisection for the edge probability where P(YES) crosses 1/2.

    Each probe starts with ``trials`` samples and doubles (up to
    ``max_extend * trials``) while the Wilson interval still contains 1/2.
    Bisection stops once ``p_hi - p_lo <= tol * p_hi``.  With an incomplete
    decider the curve is the certified-YES probability, so the result is a
    lower bound on the true threshold and is labelled as such.
    """
    name = _check_decider(decider, d)
    if trials <= 0 or not 0.0 < tol < 1.0:
        raise InvalidInput("need trials > 0 and 0 < tol < 1")
    probes: list = []

    def probe(p: float, base: int) -> ProbabilityEstimate:
        est = _estimate_range(n, p, 0, base, decider, d, seed, workers, budget)
        cap = max_extend * trials
        while est.trials < cap:
            lo, hi = est.ci_yes
            if not lo <= 0.5 <= hi:
                break
            more = min(est.trials, cap - est.trials)
            est = est.merge(_estimate_range(n, p, est.trials, est.trials + more, decider, d, seed, workers, budget))
        _check_monotone(probes, est)
        probes.append(est)
        return est

    lo = p_min if p_min is not None else 1.0 / max(n, 2) ** 2
    hi = 1.0
    # endpoints are screened with a small sample, grown only if ambiguous
    screen = min(trials, 100)
    top = probe(hi, screen)
    lower_bound = name == "pipeline"
    if top.frac_yes > 0.5:
        c, label = scaled(1.0, n, d)
        return ThresholdEstimate(n, 1.0, 1.0, 1.0, c, label, trials, tol, name, d, seed,
                                 degenerate=True, lower_bound=lower_bound, probes=probes)
    bottom = probe(lo, screen)
    if bottom.frac_yes <= 0.5:
        c, label = scaled(lo, n, d)
        return ThresholdEstimate(n, lo, lo, lo, c, label, trials, tol, name, d, seed,
                                 degenerate=True, lower_bound=lower_bound, probes=probes)
    while hi - lo > tol * hi:
        mid = math.sqrt(lo * hi)
        if probe(mid, trials).frac_yes > 0.5:
            lo = mid
        else:
            hi = mid
    p_star = math.sqrt(lo * hi)
    c, label = scaled(p_star, n, d)
    return ThresholdEstimate(n, p_star, lo, hi, c, label, trials, tol, name, d, seed,
                             lower_bound=lower_bound, probes=probes)


def _check_monotone(probes, est: ProbabilityEstimate) -> None:
    lo_new, hi_new = est.ci_yes
    for other in probes:
        lo_o, hi_o = other.ci_yes
        if other.p < est.p and hi_o < lo_new:
            raise NonMonotoneSignal(f"P(YES) rises from p={other.p:.6g} to p={est.p:.6g}; increase trials")
        if other.p > est.p and hi_new < lo_o:
            raise NonMonotoneSignal(f"P(YES) rises from p={est.p:.6g} to p={other.p:.6g}; increase trials")


# ---------------------------------------------------------------------------
# u_d regime experiments
# ---------------------------------------------------------------------------

@dataclass
class URegimeReport:
    n: int
    p: float
    d: int
    trials: int
    seed: int
    k_hats: list
    histogram: dict
    mode: int
    mean: float
    exact: bool
    regime: dict
    bounds: Optional[dict]

    def fraction(self, k: int) -> float:
        return self.histogram.get(k, 0) / self.trials if self.trials else 0.0

    def to_dict(self) -> dict:
        out = asdict(self)
        out["histogram"] = {str(k): v for k, v in self.histogram.items()}
        return out


def _u_chunk(args) -> list:
    n, p, d, seed, start, stop, catalog, connected, exact_limit, node_limit = args
    out = []
    for i in range(start, stop):
        eu, ev = _trial_edges(n, p, seed, i)
        g = Graph(n, np.column_stack([eu, ev])) if eu.shape[0] else Graph(n)
        est = estimate_u(g, d, catalog=catalog, connected=connected,
                         exact_limit=exact_limit, node_limit=node_limit, p=p)
        out.append((est.k_hat, est.exact))
    return out


def u_regime_experiment(
    n: int,
    p: float,
    d: int,
    trials: int,
    catalog=None,
    seed: int = 0,
    workers: int = 1,
    connected: bool = False,
    exact_limit: int = 40,
    node_limit: int = 200_000,
    alpha: Optional[float] = None,
) -> URegimeReport:
    """Distribution of ``estimate_u`` over fresh G(n, p) samples."""
    if trials <= 0:
        raise InvalidInput("trials must be positive")
    if not 0.0 <= p <= 1.0:
        raise InvalidInput(f"edge probability must lie in [0, 1], got {p}")
    jobs = [(n, p, d, seed, a, b, catalog, connected, exact_limit, node_limit)
            for a, b in _chunks(0, trials, workers)]
    rows = [r for chunk in _map(_u_chunk, jobs, workers) for r in chunk]
    ks = [k for k, _ in rows]
    hist = histogram(ks)
    mode = max(hist.items(), key=lambda kv: (kv[1], -kv[0]))[0]
    bounds = theoretical_u_bounds(n, p, d, alpha).to_dict() if 0.0 < p < 1.0 and n * p > 1.0 else None
    return URegimeReport(
        n=n, p=float(p), d=d, trials=trials, seed=seed, k_hats=ks, histogram=hist,
        mode=mode, mean=float(np.mean(ks)), exact=all(e for _, e in rows),
        regime=regime_spec(n, p, alpha).to_dict(), bounds=bounds,
    )


# ---------------------------------------------------------------------------
# constants and reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TheoryConstants:
    t0: float = 14.797
    c_d: tuple = ((3, 55.272), (4, 164.528), (5, 504.285), (6, 1365.170), (7, 3624.758), (8, 8675.785))
    one_d_lower: float = 3.0 ** (1.0 / 3.0)
    one_d_upper: float = 12.0 ** (1.0 / 3.0)
    one_d_exact: float = (6.0 * math.log(2.0)) ** (1.0 / 3.0)
    kappa: float = 4.36
    citations: tuple = (
        ("t0", "planar realizability of G(n, c/n) fails w.h.p. for c > t0"),
        ("c_d", "realizability in R^d fails w.h.p. for p = c/n with c > c_d"),
        ("one_d", "line threshold p*(n) lies between 3^(1/3) n^(-4/3) and 12^(1/3) n^(-4/3); "
                  "the sharp constant is (6 ln 2)^(1/3)"),
        ("kappa", "every n-point unit-distance graph in the plane has an induced k-colorable "
                  "subgraph on at least kn/kappa vertices"),
    )

    def c(self, d: int) -> float:
        return dict(self.c_d)[d]

    @property
    def one_d(self) -> dict:
        return {"lower": self.one_d_lower, "upper": self.one_d_upper, "exact": self.one_d_exact}

    def to_dict(self) -> dict:
        return {
            "t0": self.t0,
            "c_d": {str(k): v for k, v in self.c_d},
            "one_d": self.one_d,
            "kappa": self.kappa,
            "citations": dict(self.citations),
        }


def reference_table() -> TheoryConstants:
    return TheoryConstants()


def to_json(obj, config: Optional[dict] = None) -> str:
    """Stable JSON: sorted keys, no timestamps, config embedded."""
    body = obj.to_dict() if hasattr(obj, "to_dict") else obj
    if config is not None:
        body = {"config": config, "result": body}
    return json.dumps(body, sort_keys=True, indent=2) + "\n"


CURVE_COLUMNS = ("n", "p", "frac_yes", "frac_no", "frac_unknown", "ci_lo", "ci_hi")


def curve_csv(estimates, config: dict) -> str:
    """CSV of probability estimates; the interval columns are for frac_yes."""
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_COLUMNS)
    for e in estimates:
        lo, hi = e.ci_yes
        w.writerow([e.n, repr(e.p), repr(e.frac_yes), repr(e.frac_no), repr(e.frac_unknown), repr(lo), repr(hi)])
    return buf.getvalue()


def u_histogram_csv(reports, config: dict) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("n", "p", "d", "k_hat", "count", "fraction"))
    for r in reports:
        for k, c in r.histogram.items():
            w.writerow([r.n, repr(r.p), r.d, k, c, repr(c / r.trials)])
    return buf.getvalue()
