"""Seeded, coupled Erdős–Rényi sampling.

Every sample is driven by a ``numpy.random.SeedSequence`` built from
``(master_seed, trial_index)``, so trial ``i`` sees the same variates no
matter how trials are ordered or split across workers.

The edge process is generated in increasing order of the per-pair uniform
labels: the sorted labels are produced as order statistics and attached to a
uniformly random ordering of the pairs.  ``G(n, p)`` is the prefix with label
``< p``.  For a fixed seed the graphs are therefore nested in ``p`` (the
standard monotone coupling), and sampling costs ``O(p * n^2)`` instead of
``O(n^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .graph import Graph

_MASK64 = (1 << 64) - 1
_BLOCK = 1024


@dataclass(frozen=True)
class GnpParams:
    n: int
    p: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise InvalidInput("n must be non-negative")
        if not 0.0 <= self.p <= 1.0:
            raise InvalidInput(f"edge probability must lie in [0, 1], got {self.p}")


def seed_sequence(master_seed: int, trial_index: int | None = None, stream: int | None = None):
    key = ()
    if trial_index is not None:
        key += (int(trial_index),)
    if stream is not None:
        key += (int(stream),)
    return np.random.SeedSequence(entropy=int(master_seed) & _MASK64, spawn_key=key)


def trial_rng(master_seed: int, trial_index: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed_sequence(master_seed, trial_index, stream)))


def pair_from_index(t: np.ndarray, n: int):
    """Decode row-major indices of the strict upper triangle into ``(u, v)``."""
    t = np.asarray(t, dtype=np.int64)
    total = n * (n - 1) // 2
    # rows counted from the bottom: index t lies in row u where
    # u = n - 2 - floor((sqrt(8(total-1-t)+1) - 1) / 2)
    k = total - 1 - t
    r = ((np.sqrt(8.0 * k + 1.0) - 1.0) // 2).astype(np.int64)
    # exact integer correction for rounding at large n
    r += ((r + 1) * (r + 2) // 2 <= k).astype(np.int64)
    r -= (r * (r + 1) // 2 > k).astype(np.int64)
    u = n - 2 - r
    start = u * (2 * n - u - 1) // 2
    v = t - start + u + 1
    return u, v


class EdgeStream:
    """Pairs of an ``n``-vertex graph in increasing order of their uniform labels."""

    def __init__(self, n: int, seed_seq: np.random.SeedSequence):
        self.n = n
        self.total = n * (n - 1) // 2
        pair_ss, label_ss = seed_seq.spawn(2)
        self._pair_rng = np.random.Generator(np.random.PCG64(pair_ss))
        self._label_rng = np.random.Generator(np.random.PCG64(label_ss))
        self._pairs = np.zeros(0, dtype=np.int64)
        self._labels = np.zeros(0, dtype=np.float64)
        self._seen = None
        self._switched = False
        self._log_survival = 0.0

    def _extend_pairs(self, need: int) -> None:
        chunks = [self._pairs]
        have = self._pairs.shape[0]
        if self._seen is None:
            self._seen = np.zeros(self.total, dtype=bool)
        while have < need and have < self.total:
            if self._switched:
                break
            if have >= self.total // 2:
                # rejection gets slow past half-full: permute what is left
                rest = np.flatnonzero(~self._seen)
                rest = self._pair_rng.permutation(rest)
                self._seen[rest] = True
                chunks.append(rest.astype(np.int64))
                have += rest.shape[0]
                self._switched = True
                break
            cand = self._pair_rng.integers(0, self.total, size=_BLOCK)
            _, first = np.unique(cand, return_index=True)
            keep = np.zeros(_BLOCK, dtype=bool)
            keep[first] = True
            keep &= ~self._seen[cand]
            acc = cand[keep]
            self._seen[acc] = True
            chunks.append(acc.astype(np.int64))
            have += acc.shape[0]
        self._pairs = np.concatenate(chunks)

    def _extend_labels(self, need: int) -> None:
        chunks = [self._labels]
        have = self._labels.shape[0]
        while have < need and have < self.total:
            v = self._label_rng.random(_BLOCK)
            v = 1.0 - v  # in (0, 1]
            k = np.arange(have, have + _BLOCK, dtype=np.float64)
            remaining = self.total - k
            valid = remaining > 0
            inc = np.where(valid, np.log(v) / np.where(valid, remaining, 1.0), 0.0)
            logs = self._log_survival + np.cumsum(inc)
            self._log_survival = float(logs[-1])
            take = min(_BLOCK, self.total - have)
            chunks.append(-np.expm1(logs[:take]))
            have += take
        self._labels = np.concatenate(chunks)

    def prefix_below(self, p: float):
        """``(pair_index, label)`` arrays for every pair whose label is ``< p``."""
        if self.total == 0 or p <= 0.0:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.float64)
        if p >= 1.0:
            count = self.total
            self._extend_labels(count)
        else:
            while True:
                if self._labels.shape[0] and self._labels[-1] >= p:
                    break
                if self._labels.shape[0] >= self.total:
                    break
                self._extend_labels(self._labels.shape[0] + _BLOCK)
            count = int(np.searchsorted(self._labels, p, side="left"))
        self._extend_pairs(count)
        return self._pairs[:count], self._labels[:count]

    def graph(self, p: float) -> Graph:
        idx, _ = self.prefix_below(p)
        if idx.shape[0] == 0:
            return Graph(self.n)
        u, v = pair_from_index(idx, self.n)
        return Graph(self.n, np.column_stack([u, v]))


def sample_gnp(params: GnpParams, trial_index: int | None = None) -> Graph:
    """Draw ``G(n, p)``; the seed (and optional trial index) fix the variates."""
    if params.p >= 1.0:
        from .graph import complete_graph

        return complete_graph(params.n)
    stream = EdgeStream(params.n, seed_sequence(params.seed, trial_index))
    return stream.graph(params.p)


def trial_graph(n: int, p: float, master_seed: int, trial_index: int) -> Graph:
    return sample_gnp(GnpParams(n, p, master_seed), trial_index)
