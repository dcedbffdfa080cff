"""Exact combinatorial solvers on bitset adjacency.

The kernels are iterative (explicit stacks) so the same code runs under numba
and as plain Python.  Vertex budgets are hard limits: above them the public
wrappers raise :class:`BudgetExceeded` instead of falling back to heuristics.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from . import bitset
from ._accel import njit
from .bitset import ONE, ZERO, bit, lowbit_index, popcount, popcount64
from .errors import BudgetExceeded, InvalidInput
from .graph import Graph

DEFAULT_BUDGET = 40
INDUCED_BUDGET = 64
MATCH_BUDGET = 12
_WORD_LIMIT = 64

PARITY = {"any": 0, "odd": 1, "even": 2}


# ---------------------------------------------------------------------------
# single-word kernels (n <= 64): clique, coloring
# ---------------------------------------------------------------------------

@njit
def _greedy_color_sort(adj1, P, order_row, bound_row):
    idx = 0
    color = 0
    U = P
    while U != ZERO:
        color += 1
        Q = U
        while Q != ZERO:
            v = lowbit_index(Q)
            b = ONE << np.uint64(v)
            Q &= ~b
            Q &= ~adj1[v]
            U &= ~b
            order_row[idx] = v
            bound_row[idx] = color
            idx += 1
    return idx


@njit
def max_clique_kernel(adj1, n, stop_at):
    """Maximum clique (mask, size); returns early once a clique of size ``stop_at`` is found."""
    if n == 0:
        return ZERO, 0
    order = np.zeros((n + 1, n), dtype=np.int64)
    bound = np.zeros((n + 1, n), dtype=np.int64)
    cnt = np.zeros(n + 1, dtype=np.int64)
    pcur = np.zeros(n + 1, dtype=np.uint64)
    chosen = np.zeros(n + 1, dtype=np.uint64)
    full = ZERO
    for v in range(n):
        full |= ONE << np.uint64(v)
    best = 0
    best_mask = ZERO
    depth = 0
    pcur[0] = full
    chosen[0] = ZERO
    cnt[0] = _greedy_color_sort(adj1, full, order[0], bound[0])
    while depth >= 0:
        i = cnt[depth] - 1
        if i < 0 or depth + bound[depth, i] <= best:
            depth -= 1
            continue
        cnt[depth] = i
        v = order[depth, i]
        b = ONE << np.uint64(v)
        newp = pcur[depth] & adj1[v]
        pcur[depth] &= ~b
        clique = chosen[depth] | b
        if newp == ZERO:
            if depth + 1 > best:
                best = depth + 1
                best_mask = clique
                if best >= stop_at:
                    return best_mask, best
            continue
        depth += 1
        pcur[depth] = newp
        chosen[depth] = clique
        cnt[depth] = _greedy_color_sort(adj1, newp, order[depth], bound[depth])
    return best_mask, best


@njit
def k_colorable_kernel(adj1, n, k, order):
    """Backtracking k-coloring along ``order`` with new-color symmetry breaking."""
    colors = np.full(n, -1, dtype=np.int64)
    if n == 0:
        return True, colors
    if k <= 0:
        return False, colors
    classes = np.zeros(k, dtype=np.uint64)
    tried = np.zeros(n + 1, dtype=np.int64)
    used = np.zeros(n + 1, dtype=np.int64)
    pos = 0
    while True:
        if pos == n:
            return True, colors
        v = order[pos]
        c = tried[pos]
        limit = used[pos] + 1
        if limit > k:
            limit = k
        placed = False
        while c < limit:
            if classes[c] & adj1[v] == ZERO:
                classes[c] |= ONE << np.uint64(v)
                colors[v] = c
                tried[pos] = c + 1
                used[pos + 1] = used[pos] if used[pos] > c + 1 else c + 1
                pos += 1
                placed = True
                break
            c += 1
        if not placed:
            tried[pos] = 0
            pos -= 1
            if pos < 0:
                return False, colors
            u = order[pos]
            classes[colors[u]] &= ~(ONE << np.uint64(u))
            colors[u] = -1


def _single_word(g: Graph) -> np.ndarray:
    if g.n > _WORD_LIMIT:
        raise BudgetExceeded(f"single-word kernels handle at most {_WORD_LIMIT} vertices, got {g.n}")
    if g.n == 0:
        return np.zeros(0, dtype=np.uint64)
    return np.ascontiguousarray(g.adj[:, 0])


def _check_budget(g: Graph, budget: int) -> None:
    if budget > _WORD_LIMIT:
        raise InvalidInput(f"exact coloring/independence budget is capped at {_WORD_LIMIT}")
    if g.n > budget:
        raise BudgetExceeded(f"graph has {g.n} vertices, budget is {budget}")


def max_clique(g: Graph, stop_at: Optional[int] = None) -> list:
    adj1 = _single_word(g)
    mask, _ = max_clique_kernel(adj1, g.n, stop_at if stop_at is not None else g.n + 1)
    return bitset.to_indices(np.array([mask], dtype=np.uint64))


def clique_number(g: Graph) -> int:
    return len(max_clique(g))


def coloring_order(g: Graph, seed_clique: list) -> np.ndarray:
    """Clique first, then repeatedly the vertex with most already-ordered neighbours."""
    n = g.n
    mat = g.matrix()
    deg = mat.sum(axis=1)
    placed = np.zeros(n, dtype=bool)
    order = list(seed_clique)
    placed[order] = True
    weight = mat[:, order].sum(axis=1) if order else np.zeros(n, dtype=np.int64)
    while len(order) < n:
        key = np.where(placed, -1, weight * (n + 1) + deg)
        v = int(np.argmax(key))
        order.append(v)
        placed[v] = True
        weight = weight + mat[:, v]
    return np.asarray(order, dtype=np.int64)


def greedy_coloring(g: Graph, order=None) -> np.ndarray:
    colors = np.full(g.n, -1, dtype=np.int64)
    for v in range(g.n) if order is None else order:
        taken = {int(colors[u]) for u in g.neighbors(int(v))}
        c = 0
        while c in taken:
            c += 1
        colors[v] = c
    return colors


def optimal_coloring(g: Graph, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """An optimal proper coloring (colors ``0..chi-1``)."""
    _check_budget(g, budget)
    if g.n == 0:
        return np.zeros(0, dtype=np.int64)
    adj1 = _single_word(g)
    clique = max_clique(g)
    order = coloring_order(g, clique)
    upper = greedy_coloring(g, order)
    ub = int(upper.max()) + 1
    for k in range(len(clique), ub):
        ok, colors = k_colorable_kernel(adj1, g.n, k, order)
        if ok:
            return colors
    return upper


def chromatic_number(g: Graph, budget: int = DEFAULT_BUDGET) -> int:
    """Exact chromatic number: clique lower bound, greedy upper bound, backtracking in between."""
    if g.n == 0:
        _check_budget(g, budget)
        return 0
    return int(optimal_coloring(g, budget).max()) + 1


def is_k_colorable(g: Graph, k: int, budget: int = DEFAULT_BUDGET) -> bool:
    _check_budget(g, budget)
    if g.n == 0:
        return True
    adj1 = _single_word(g)
    order = coloring_order(g, max_clique(g))
    ok, _ = k_colorable_kernel(adj1, g.n, k, order)
    return bool(ok)


def independence_number(g: Graph, budget: int = DEFAULT_BUDGET) -> int:
    _check_budget(g, budget)
    if g.n == 0:
        return 0
    return clique_number(g.complement())


# ---------------------------------------------------------------------------
# induced cycles (multi-word)
# ---------------------------------------------------------------------------

@njit
def _lex_less(cand, best, length):
    # both arrays sorted ascending over [0, length)
    for i in range(length):
        if cand[i] != best[i]:
            return cand[i] < best[i]
    return False


@njit
def induced_cycle_kernel(adj, n, parity, min_len, max_len, node_limit, allowed):
    """Longest chordless cycle with length in ``[min_len, max_len]`` of the requested parity.

    Cycles are grown as induced paths from their smallest vertex ``v``; a
    path vertex may touch ``v`` only when it closes the cycle.  Among optimal
    cycles the lexicographically smallest vertex set wins.  ``node_limit > 0``
    truncates the search (heuristic mode).  Only vertices in ``allowed`` are used.

    Returns ``(length, cycle_in_order, truncated)``; length 0 means none.
    """
    nw = adj.shape[1]
    best_len = 0
    best_min = n
    best_cycle = np.zeros(n + 1, dtype=np.int64)
    best_sorted = np.zeros(n + 1, dtype=np.int64)
    tmp_sorted = np.zeros(n + 1, dtype=np.int64)
    path = np.zeros(n + 2, dtype=np.int64)
    cand = np.zeros((n + 2, nw), dtype=np.uint64)
    avail = np.zeros((n + 2, nw), dtype=np.uint64)
    above = np.zeros(nw, dtype=np.uint64)
    nv = np.zeros(nw, dtype=np.uint64)
    tmp = np.zeros(nw, dtype=np.uint64)
    gt_x1 = np.zeros(nw, dtype=np.uint64)
    nodes = 0
    truncated = False
    if max_len > n:
        max_len = n
    for v in range(n):
        if not ((allowed[v >> 6] & bit(v)) != ZERO):
            continue
        # vertices usable after v
        for w in range(nw):
            above[w] = ZERO
        for u in range(v + 1, n):
            above[u >> 6] |= bit(u)
        for w in range(nw):
            above[w] &= allowed[w]
            nv[w] = adj[v, w] & above[w]
        if popcount(nv) < 2:
            continue
        ub0 = 1 + popcount(above)
        if ub0 > max_len:
            ub0 = max_len
        if parity == 1 and ub0 % 2 == 0:
            ub0 -= 1
        if parity == 2 and ub0 % 2 == 1:
            ub0 -= 1
        if ub0 < min_len or ub0 < best_len or (ub0 == best_len and best_min < v):
            continue
        path[0] = v
        for w in range(nw):
            cand[1, w] = nv[w]
        depth = 1
        while depth >= 1:
            x = -1
            for w in range(nw):
                if cand[depth, w] != ZERO:
                    b = lowbit_index(cand[depth, w])
                    cand[depth, w] &= ~(ONE << np.uint64(b))
                    x = (w << 6) + b
                    break
            if x < 0:
                depth -= 1
                continue
            nodes += 1
            if node_limit > 0 and nodes > node_limit:
                truncated = True
                break
            path[depth] = x
            if depth == 1:
                for w in range(nw):
                    avail[1, w] = above[w]
                avail[1, x >> 6] &= ~bit(x)
                for w in range(nw):
                    gt_x1[w] = ZERO
                for u in range(x + 1, n):
                    gt_x1[u >> 6] |= bit(u)
            # closing vertices: adjacent to x and v, in avail, > x1 (one orientation)
            length = depth + 2
            closer = -1
            if length >= min_len and length <= max_len:
                ok_par = parity == 0 or (parity == 1 and length % 2 == 1) or (parity == 2 and length % 2 == 0)
                if ok_par:
                    for w in range(nw):
                        t = adj[x, w] & avail[depth, w] & nv[w] & gt_x1[w]
                        if t != ZERO:
                            closer = (w << 6) + lowbit_index(t)
                            break
            if closer >= 0:
                better = False
                if length > best_len:
                    better = True
                elif length == best_len and v == best_min:
                    for i in range(depth + 1):
                        tmp_sorted[i] = path[i]
                    tmp_sorted[depth + 1] = closer
                    srt = np.sort(tmp_sorted[:length])
                    better = _lex_less(srt, best_sorted, length)
                if better:
                    best_len = length
                    best_min = v
                    for i in range(depth + 1):
                        best_cycle[i] = path[i]
                    best_cycle[depth + 1] = closer
                    srt2 = np.sort(best_cycle[:length])
                    for i in range(length):
                        best_sorted[i] = srt2[i]
            # extension
            if depth + 3 > max_len:
                continue
            cnt_ext = 0
            for w in range(nw):
                tmp[w] = avail[depth, w] & ~adj[x, w]
                cand[depth + 1, w] = adj[x, w] & avail[depth, w] & ~nv[w]
                cnt_ext += popcount64(cand[depth + 1, w])
            if cnt_ext == 0:
                continue
            tmp[x >> 6] &= ~bit(x)
            ub = depth + 2 + popcount(tmp)
            if ub > max_len:
                ub = max_len
            if parity == 1 and ub % 2 == 0:
                ub -= 1
            if parity == 2 and ub % 2 == 1:
                ub -= 1
            if ub < min_len or ub < best_len or (ub == best_len and best_min < v):
                continue
            for w in range(nw):
                avail[depth + 1, w] = tmp[w]
            depth += 1
        if truncated:
            break
    return best_len, best_cycle[:best_len].copy(), truncated


def _canonical_cycle(cycle) -> tuple:
    """Rotate to start at the minimum vertex, heading to its smaller neighbour."""
    cyc = [int(x) for x in cycle]
    i = cyc.index(min(cyc))
    cyc = cyc[i:] + cyc[:i]
    if len(cyc) > 2 and cyc[-1] < cyc[1]:
        cyc = [cyc[0]] + cyc[1:][::-1]
    return tuple(cyc)


def largest_induced_cycle(
    g: Graph,
    parity: str = "any",
    max_len: Optional[int] = None,
    within=None,
    limit: int = INDUCED_BUDGET,
    node_limit: int = 0,
):
    """Longest chordless cycle of the given parity as ``(size, vertices)``, or ``None``.

    ``within`` restricts the search to a vertex subset.  ``limit`` bounds the
    vertex count of an exact search; ``node_limit`` turns on truncated search
    (the result is then only a lower bound and the third tuple entry is True).
    """
    if parity not in PARITY:
        raise InvalidInput(f"parity must be one of {sorted(PARITY)}")
    if g.n > limit:
        raise BudgetExceeded(f"induced-cycle search limited to {limit} vertices, got {g.n}")
    res = induced_cycle_search(g, parity, max_len=max_len, within=within, node_limit=node_limit)
    size, cycle, truncated = res
    if size == 0:
        return None
    if node_limit:
        return size, cycle, truncated
    return size, cycle


def induced_cycle_search(g: Graph, parity: str = "any", max_len=None, min_len: int = 3, within=None,
                         node_limit: int = 0):
    if g.n < 3:
        return 0, (), False
    allowed = bitset.from_indices(range(g.n) if within is None else within, g.n)
    cap = g.n if max_len is None else int(max_len)
    size, cycle, truncated = induced_cycle_kernel(
        np.ascontiguousarray(g.adj), g.n, PARITY[parity], int(min_len), cap, int(node_limit), allowed
    )
    if size == 0:
        return 0, (), bool(truncated)
    return int(size), _canonical_cycle(cycle), bool(truncated)


# ---------------------------------------------------------------------------
# induced subgraph matching (multi-word host, small pattern)
# ---------------------------------------------------------------------------

@njit
def _fill_candidates(cand, depth, order, mapped, hmat, gadj, allowed, used, valid):
    nw = gadj.shape[1]
    hv = order[depth]
    for w in range(nw):
        cand[depth, w] = allowed[w] & ~used[w] & valid[w]
    for j in range(depth):
        gu = mapped[j]
        if hmat[hv, order[j]]:
            for w in range(nw):
                cand[depth, w] &= gadj[gu, w]
        else:
            for w in range(nw):
                cand[depth, w] &= ~gadj[gu, w]


@njit
def induced_match_kernel(gadj, n, hmat, order, allowed, required, req_count):
    """Find an induced copy of the pattern ``hmat`` with image inside ``allowed``
    that covers every vertex of ``required``.  Returns (found, image) where
    ``image[i]`` is the host vertex of pattern vertex ``i``."""
    k = hmat.shape[0]
    nw = gadj.shape[1]
    image = np.full(k, -1, dtype=np.int64)
    if k == 0:
        return True, image
    cand = np.zeros((k + 1, nw), dtype=np.uint64)
    used = np.zeros(nw, dtype=np.uint64)
    valid = np.zeros(nw, dtype=np.uint64)
    for v in range(n):
        valid[v >> 6] |= bit(v)
    mapped = np.full(k, -1, dtype=np.int64)
    req_left = np.zeros(k + 1, dtype=np.int64)

    req_left[0] = req_count
    _fill_candidates(cand, 0, order, mapped, hmat, gadj, allowed, used, valid)
    depth = 0
    while depth >= 0:
        x = -1
        for w in range(nw):
            if cand[depth, w] != ZERO:
                b = lowbit_index(cand[depth, w])
                cand[depth, w] &= ~(ONE << np.uint64(b))
                x = (w << 6) + b
                break
        if mapped[depth] >= 0:
            prev = mapped[depth]
            used[prev >> 6] &= ~bit(prev)
            mapped[depth] = -1
        if x < 0:
            depth -= 1
            continue
        is_req = (required[x >> 6] & bit(x)) != ZERO
        left = req_left[depth] - (1 if is_req else 0)
        if left > k - depth - 1:
            continue
        mapped[depth] = x
        used[x >> 6] |= bit(x)
        if depth + 1 == k:
            for i in range(k):
                image[order[i]] = mapped[i]
            return True, image
        req_left[depth + 1] = left
        depth += 1
        _fill_candidates(cand, depth, order, mapped, hmat, gadj, allowed, used, valid)
    return False, image


def _pattern_order(h: Graph) -> np.ndarray:
    """BFS order from a max-degree vertex so each step is constrained by an edge."""
    if h.n == 0:
        return np.zeros(0, dtype=np.int64)
    deg = h.degrees
    seen = []
    remaining = set(range(h.n))
    while remaining:
        start = max(remaining, key=lambda v: (deg[v], -v))
        queue = [start]
        remaining.discard(start)
        while queue:
            v = queue.pop(0)
            seen.append(v)
            for u in sorted(h.neighbors(v), key=lambda u: (-deg[u], u)):
                if u in remaining:
                    remaining.discard(u)
                    queue.append(u)
    return np.asarray(seen, dtype=np.int64)


def _match(g: Graph, h: Graph, allowed_idx, required_idx):
    allowed = bitset.from_indices(allowed_idx, g.n)
    required = bitset.from_indices(required_idx, g.n)
    found, image = induced_match_kernel(
        np.ascontiguousarray(g.adj), g.n, h.matrix(), _pattern_order(h), allowed, required, len(required_idx)
    )
    return bool(found), image


def contains_induced(g: Graph, h: Graph, limit: int = MATCH_BUDGET):
    """Induced copy of ``h`` in ``g`` whose vertex set is lexicographically smallest.

    Returns a tuple ``w`` with ``w[i]`` the vertex of ``g`` playing pattern
    vertex ``i`` (so ``sorted(w)`` is the witness set), or ``None``.
    """
    if h.n > limit:
        raise BudgetExceeded(f"induced matching limited to patterns of {limit} vertices, got {h.n}")
    if h.n == 0:
        return ()
    if h.n > g.n or h.m > g.m:
        return None
    found, image = _match(g, h, range(g.n), [])
    if not found:
        return None
    prefix: list = []
    for _ in range(h.n):
        lo = prefix[-1] + 1 if prefix else 0
        for c in range(lo, g.n):
            ok, img = _match(g, h, prefix + [c] + list(range(c + 1, g.n)), prefix + [c])
            if ok:
                prefix.append(c)
                image = img
                break
    return tuple(int(x) for x in image)


def find_clique(g: Graph, size: int):
    """Lexicographically smallest clique of ``size`` vertices, or ``None``.

    Works for any ``n``: candidates are restricted to higher-numbered
    neighbours, which stays cheap on sparse graphs.
    """
    if size <= 0:
        return ()
    if size == 1:
        return (0,) if g.n else None
    if g.n < size:
        return None
    deg = g.degrees
    nbrs = [None] * g.n

    def later(v):
        if nbrs[v] is None:
            nbrs[v] = [u for u in g.neighbors(v) if u > v]
        return nbrs[v]

    def extend(clique, cands):
        if len(clique) == size:
            return clique
        need = size - len(clique)
        for i, u in enumerate(cands):
            if len(cands) - i < need:
                return None
            if deg[u] < size - 1:
                continue
            nxt = [w for w in cands[i + 1:] if g.has_edge(u, w)]
            found = extend(clique + [u], nxt)
            if found:
                return found
        return None

    for v in range(g.n):
        if deg[v] < size - 1:
            continue
        found = extend([v], later(v))
        if found:
            return tuple(found)
    return None
