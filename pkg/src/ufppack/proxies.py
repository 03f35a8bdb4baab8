"""Multi-proxy classification scoring, analytic gradients, adaptive proxy count.

A class is represented by K weight vectors (proxies). The classification
probability is a sigmoid of a softmax-weighted aggregate of per-proxy cosine
similarities, scaled by gamma; with K = 1 this reduces exactly to the
single-proxy sigmoid head.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .clustering import dbscan


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + np.exp(-z))
    e = np.exp(z)
    return e / (1.0 + e)


@dataclass
class ProxyBank:
    """Per-class proxy weight matrices (K_i x C) plus the shared scale gamma."""

    weights: dict[int, np.ndarray] = field(default_factory=dict)
    gamma: float = 5.0

    def __post_init__(self) -> None:
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        for cid, w in self.weights.items():
            w = np.asarray(w, dtype=float)
            if w.ndim != 2 or w.shape[0] < 1:
                raise ValueError(f"class {cid}: proxies must form a K x C matrix")
            if np.any(np.linalg.norm(w, axis=1) == 0):
                raise ValueError(f"class {cid}: zero-norm proxy row")
            self.weights[cid] = w


def single_proxy_prob(w: np.ndarray, x: np.ndarray) -> float:
    """Sigmoid(w^T x)."""
    w = np.asarray(w, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.linalg.norm(w) == 0 or np.linalg.norm(x) == 0:
        raise ValueError("zero vector")
    return _sigmoid(float(w @ x))


def similarity_profile(weights: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Cosine similarity of x against every proxy row."""
    x = np.asarray(x, dtype=float)
    xn = np.linalg.norm(x)
    if xn == 0:
        raise ValueError("zero feature vector")
    wn = np.linalg.norm(weights, axis=1)
    return (weights @ x) / (wn * xn)


def multi_proxy_prob(bank: ProxyBank, class_id: int, x: np.ndarray) -> float:
    """Sigmoid(gamma * sum_k softmax(s)_k * s_k) over proxy cosine similarities."""
    s = similarity_profile(bank.weights[class_id], x)
    w = np.exp(s - np.max(s))
    w /= w.sum()
    return _sigmoid(bank.gamma * float(w @ s))


def multi_proxy_logit(
    bank: ProxyBank, class_id: int, x: np.ndarray
) -> tuple[float, np.ndarray, np.ndarray]:
    """Pre-sigmoid logit z = gamma * aggregate and its gradients.

    Returns (z, dz_dx of shape C, dz_dw of shape K x C). Working at the
    logit level keeps cross-entropy gradients finite when the sigmoid
    saturates.
    """
    W = bank.weights[class_id]
    x = np.asarray(x, dtype=float)
    xn = np.linalg.norm(x)
    if xn == 0:
        raise ValueError("zero feature vector")
    wn = np.linalg.norm(W, axis=1)
    s = (W @ x) / (wn * xn)
    alpha = np.exp(s - np.max(s))
    alpha /= alpha.sum()
    agg = float(alpha @ s)
    # d(agg)/d(s_k) = alpha_k * (1 + s_k - agg)
    dagg_ds = alpha * (1.0 + s - agg)
    # d(s_k)/dx = (w_k/|w_k| - s_k x/|x|) / |x|
    ds_dx = (W / wn[:, None] - s[:, None] * (x / xn)[None, :]) / xn
    # d(s_k)/dw_k = (x/|x| - s_k w_k/|w_k|) / |w_k|
    ds_dw = ((x / xn)[None, :] - s[:, None] * (W / wn[:, None])) / wn[:, None]
    z = bank.gamma * agg
    dz_dx = bank.gamma * (dagg_ds @ ds_dx)
    dz_dw = bank.gamma * dagg_ds[:, None] * ds_dw
    return z, dz_dx, dz_dw


def multi_proxy_grad(
    bank: ProxyBank, class_id: int, x: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Gradient of multi_proxy_prob w.r.t. x and w.r.t. the class's proxies.

    Returns (grad_x of shape C, grad_w of shape K x C).
    """
    z, dz_dx, dz_dw = multi_proxy_logit(bank, class_id, x)
    sig = _sigmoid(z)
    dp_dz = sig * (1.0 - sig)
    return dp_dz * dz_dx, dp_dz * dz_dw


def aggregate_bounds(bank: ProxyBank, class_id: int, x: np.ndarray) -> tuple[float, float]:
    """Probability bounds implied by the similarity range."""
    s = similarity_profile(bank.weights[class_id], x)
    return _sigmoid(bank.gamma * float(np.min(s))), _sigmoid(bank.gamma * float(np.max(s)))


def adaptive_k(
    features: np.ndarray,
    eps: float = 0.3,
    min_pts: int = 5,
    k_max: int = 20,
) -> int:
    """Proxy count from DBSCAN over L2-normalized features, floored at 1."""
    features = np.asarray(features, dtype=float)
    if features.shape[0] == 0:
        raise ValueError("empty feature list")
    norms = np.linalg.norm(features, axis=1)
    if np.any(norms == 0):
        raise ValueError("zero-norm feature vector")
    labels = dbscan(features / norms[:, None], eps, min_pts)
    count = int(labels.max()) + 1 if labels.size else 0
    return max(1, min(count, k_max))
