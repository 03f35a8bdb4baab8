"""Per-class FIFO feature vocabularies, marginal estimation, contrastive loss.

Each class keeps a fixed-capacity queue of instance feature vectors. Cluster
sizes from k-means over the queue estimate the per-proxy marginal
distribution, sorted descending so index k always names the k-th most
probable cluster.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .clustering import kmeans


class InsufficientVocabularyError(ValueError):
    """Queue holds fewer vectors than the requested cluster count."""


class VocabQueue:
    """Fixed-capacity FIFO of feature vectors for one class."""

    def __init__(self, capacity: int, class_id: int):
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self.class_id = class_id
        self._entries: deque[np.ndarray] = deque(maxlen=capacity)

    def __len__(self) -> int:
        return len(self._entries)

    def update(
        self, batch_positives: Sequence[np.ndarray], m: int, rng: np.random.Generator
    ) -> "VocabQueue":
        """Insert m batch vectors chosen uniformly at random, evicting oldest."""
        if m < 0:
            raise ValueError(f"m must be nonnegative, got {m}")
        if not batch_positives or m == 0:
            return self
        if m > len(batch_positives):
            raise ValueError(f"m={m} exceeds batch size {len(batch_positives)}")
        chosen = rng.choice(len(batch_positives), size=m, replace=False)
        for i in sorted(int(j) for j in chosen):
            self._entries.append(np.asarray(batch_positives[i], dtype=float).copy())
        return self

    def snapshot(self) -> np.ndarray:
        """Entries as an array, oldest first."""
        if not self._entries:
            return np.empty((0, 0))
        return np.stack(list(self._entries))


@dataclass
class MarginalEstimate:
    p: np.ndarray  # descending probability per cluster
    cluster_sizes: np.ndarray


def estimate_marginals(queue: VocabQueue, k: int, seed: int) -> MarginalEstimate:
    """Cluster the queue with seeded k-means and return sorted cluster masses."""
    if len(queue) < k:
        raise InsufficientVocabularyError(
            f"class {queue.class_id}: vocabulary holds {len(queue)} < {k} vectors"
        )
    rng = np.random.default_rng(seed)
    labels, _ = kmeans(queue.snapshot(), k, rng)
    sizes = np.bincount(labels, minlength=k)
    order = np.argsort(-sizes, kind="stable")
    sizes = sizes[order]
    return MarginalEstimate(p=sizes / sizes.sum(), cluster_sizes=sizes)


def _class_logsumexp(words: np.ndarray, x: np.ndarray) -> float:
    s = words @ x
    m = float(np.max(s))
    return m + float(np.log(np.sum(np.exp(s - m))))


def contrastive_loss(
    instances: Sequence[tuple[np.ndarray, int]], vocab: Mapping[int, VocabQueue]
) -> float:
    """Mean negative log-ratio of own-class to all-class vocabulary affinity."""
    if not instances:
        raise ValueError("no instances")
    all_words = _stack_vocab(vocab)
    total = 0.0
    for x, class_id in instances:
        x = np.asarray(x, dtype=float)
        own = vocab[class_id].snapshot()
        if own.size == 0:
            raise ValueError(f"class {class_id} has an empty vocabulary")
        total += _class_logsumexp(all_words, x) - _class_logsumexp(own, x)
    return total / len(instances)


def contrastive_grad(
    instance: tuple[np.ndarray, int], vocab: Mapping[int, VocabQueue]
) -> np.ndarray:
    """Analytic gradient of the single-instance contrastive term w.r.t. x."""
    x, class_id = instance
    x = np.asarray(x, dtype=float)
    own = vocab[class_id].snapshot()
    if own.size == 0:
        raise ValueError(f"class {class_id} has an empty vocabulary")
    all_words = _stack_vocab(vocab)
    return _softmax_mean(all_words, x) - _softmax_mean(own, x)


def _softmax_mean(words: np.ndarray, x: np.ndarray) -> np.ndarray:
    s = words @ x
    w = np.exp(s - np.max(s))
    w /= w.sum()
    return w @ words


def _stack_vocab(vocab: Mapping[int, VocabQueue]) -> np.ndarray:
    parts = [q.snapshot() for q in vocab.values() if len(q) > 0]
    if not parts:
        raise ValueError("all vocabularies are empty")
    return np.concatenate(parts)
