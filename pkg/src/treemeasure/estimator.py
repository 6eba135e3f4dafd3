"""Seeded Monte-Carlo estimation of prefix-determined event probabilities.

A statistical cross-check for the exact pipelines: estimates come with
two-sided 99% Hoeffding intervals, which are distribution-free and valid at
every sample size.  Sampling is batched; each batch derives its generator
from (seed, batch index), so results do not depend on scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .trees import Alphabet, CompleteTree, FiniteTree, heap_index, node_count
from .analytic import PathLangSpec

_BATCH = 4096
_CONFIDENCE = 0.99


@dataclass(frozen=True)
class Estimate:
    point: float
    ci_low: float
    ci_high: float
    samples: int
    seed: int
    depth: int

    def contains(self, value) -> bool:
        return self.ci_low <= float(value) <= self.ci_high


def hoeffding_halfwidth(samples: int, confidence: float = _CONFIDENCE) -> float:
    """Two-sided distribution-free half width: sqrt(ln(2/alpha) / (2n))."""
    alpha = 1.0 - confidence
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * samples))


def _make_estimate(hits: int, samples: int, seed: int, depth: int) -> Estimate:
    point = hits / samples
    half = hoeffding_halfwidth(samples)
    return Estimate(
        point=point,
        ci_low=max(0.0, point - half),
        ci_high=min(1.0, point + half),
        samples=samples,
        seed=seed,
        depth=depth,
    )


def _batch_generator(seed: int, batch_index: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(batch_index,)))
    )


def _label_batches(alphabet: Alphabet, depth: int, samples: int, seed: int):
    """Yield matrices of symbol indices, one row per sampled tree."""
    n = node_count(depth)
    k = len(alphabet)
    done = 0
    batch_index = 0
    while done < samples:
        m = min(_BATCH, samples - done)
        rng = _batch_generator(seed, batch_index)
        yield rng.integers(0, k, size=(m, n), dtype=np.int64)
        done += m
        batch_index += 1


def estimate_event(
    predicate,
    alphabet: Alphabet,
    depth: int,
    samples: int,
    seed: int,
) -> Estimate:
    """Frequency of the predicate over independent uniform height-`depth` trees."""
    if samples < 100:
        raise PreconditionError("at least 100 samples are required")
    syms = alphabet.symbols
    hits = 0
    for batch in _label_batches(alphabet, depth, samples, seed):
        for row in batch.tolist():
            t = CompleteTree(depth, tuple(map(syms.__getitem__, row)), alphabet)
            if predicate(t):
                hits += 1
    return _make_estimate(hits, samples, seed, depth)


def estimate_subtree_occurrence(
    t: FiniteTree,
    depth: int,
    samples: int,
    seed: int,
) -> Estimate:
    """Frequency of sampled trees containing t as a sub-tree at some position.

    Only anchors that keep t fully inside the sampled prefix are considered,
    hence the precondition depth >= height(t).
    """
    if samples < 100:
        raise PreconditionError("at least 100 samples are required")
    t_height = t.height()
    if t_height < 0:
        raise PreconditionError("the finite tree must be nonempty")
    if depth < t_height:
        raise PreconditionError(f"sampling depth {depth} below the tree height {t_height}")
    alphabet = t.alphabet
    items = [(pos, alphabet.index(sym)) for pos, sym in t.labels.items()]
    anchors = []
    from .trees import positions_up_to

    for anchor in positions_up_to(depth - t_height):
        anchors.append([(heap_index(anchor + pos), sym_i) for pos, sym_i in items])
    hits = 0
    for batch in _label_batches(alphabet, depth, samples, seed):
        found = np.zeros(batch.shape[0], dtype=bool)
        for anchor_items in anchors:
            match = np.ones(batch.shape[0], dtype=bool)
            for idx, sym_i in anchor_items:
                match &= batch[:, idx] == sym_i
            found |= match
        hits += int(found.sum())
    return _make_estimate(hits, samples, seed, depth)


def estimate_path_truncation(
    spec: PathLangSpec,
    i: int,
    samples: int,
    seed: int,
) -> Estimate:
    """Probability of an allowed-label root path of i nodes, from height-i samples."""
    if samples < 100:
        raise PreconditionError("at least 100 samples are required")
    if i == 0:
        return _make_estimate(samples, samples, seed, 0)
    alphabet = spec.alphabet
    allowed = np.zeros(len(alphabet), dtype=bool)
    for sym in spec.allowed:
        allowed[alphabet.index(sym)] = True
    hits = 0
    for batch in _label_batches(alphabet, i, samples, seed):
        in_a = allowed[batch]
        alive = in_a[:, 0:1]
        col = 1
        for level in range(1, i):
            width = 1 << level
            level_cols = in_a[:, col : col + width]
            alive = np.repeat(alive, 2, axis=1) & level_cols
            col += width
        hits += int(alive.any(axis=1).sum())
    return _make_estimate(hits, samples, seed, i)
