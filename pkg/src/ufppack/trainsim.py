"""Gradient-descent simulation of multi-proxy training on synthetic features.

Each class draws features from several modes on the unit sphere with
imbalanced mode weights. Proxies are trained with binary cross-entropy on
the multi-proxy probability; optionally a transport-matching term with
vocabulary-estimated marginals keeps the proxies anchored to distinct
feature modes instead of drifting toward a common mean.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .clustering import kmeans
from .proxies import ProxyBank, multi_proxy_logit
from .transport import cost_matrix, sinkhorn, transport_cost
from .vocab import VocabQueue, contrastive_loss, estimate_marginals


@dataclass
class TrainConfig:
    n_classes: int = 2
    proxies_per_class: int = 3
    feature_dim: int = 16
    modes_per_class: int = 3
    mode_noise: float = 0.1
    steps: int = 2000
    batch_size: int = 16
    lr: float = 0.1
    gamma: float = 5.0
    seed: int = 0
    use_ot: bool = True
    proxy_init: str = "kmeans"  # or "random"
    vocab_capacity: int = 64
    vocab_insert: int = 8
    marginal_cadence: int = 200
    sinkhorn_epsilon: float = 0.01
    sinkhorn_max_iters: int = 150
    sinkhorn_tol: float = 1e-6

    def __post_init__(self) -> None:
        if self.n_classes < 1 or self.proxies_per_class < 1:
            raise ValueError("need at least one class and one proxy")
        if self.feature_dim < 2 or self.modes_per_class < 1:
            raise ValueError("invalid feature geometry")
        if self.steps < 0 or self.batch_size < 1 or self.lr <= 0:
            raise ValueError("invalid optimization settings")
        if self.proxy_init not in ("kmeans", "random"):
            raise ValueError(f"unknown proxy_init {self.proxy_init!r}")
        if self.vocab_insert > self.batch_size:
            raise ValueError("vocab_insert cannot exceed batch_size")

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "TrainConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class TrainReport:
    config: TrainConfig
    records: list[dict[str, float]] = field(default_factory=list)
    final_weights: dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def final_min_proxy_distance(self) -> float:
        return self.records[-1]["min_proxy_distance"] if self.records else float("nan")

    @property
    def final_max_proxy_similarity(self) -> float:
        return self.records[-1]["max_proxy_similarity"] if self.records else float("nan")


class _FeatureModel:
    """Per-class mixture of unit-sphere modes with geometrically decaying weights."""

    def __init__(self, cfg: TrainConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.centers = {}
        self.weights = {}
        for cid in range(cfg.n_classes):
            c = rng.normal(size=(cfg.modes_per_class, cfg.feature_dim))
            self.centers[cid] = c / np.linalg.norm(c, axis=1, keepdims=True)
            w = 0.45 ** np.arange(cfg.modes_per_class)
            self.weights[cid] = w / w.sum()

    def sample(self, cid: int, n: int, rng: np.random.Generator) -> np.ndarray:
        modes = rng.choice(self.cfg.modes_per_class, size=n, p=self.weights[cid])
        x = self.centers[cid][modes] + self.cfg.mode_noise * rng.normal(
            size=(n, self.cfg.feature_dim)
        )
        return x / np.linalg.norm(x, axis=1, keepdims=True)


def _init_proxies(cfg: TrainConfig, model: _FeatureModel, rng: np.random.Generator) -> ProxyBank:
    weights: dict[int, np.ndarray] = {}
    for cid in range(cfg.n_classes):
        if cfg.proxy_init == "random":
            w = rng.normal(size=(cfg.proxies_per_class, cfg.feature_dim))
        else:
            sample = model.sample(cid, max(8 * cfg.proxies_per_class, 32), rng)
            _, w = kmeans(sample, cfg.proxies_per_class, rng)
        weights[cid] = w / np.linalg.norm(w, axis=1, keepdims=True)
    return ProxyBank(weights=weights, gamma=cfg.gamma)


def _proxy_separation(bank: ProxyBank) -> tuple[float, float]:
    """(min pairwise cosine distance, max pairwise cosine similarity) within classes."""
    min_dist = np.inf
    max_sim = -np.inf
    for w in bank.weights.values():
        if w.shape[0] < 2:
            continue
        u = w / np.linalg.norm(w, axis=1, keepdims=True)
        sim = u @ u.T
        iu = np.triu_indices(w.shape[0], k=1)
        max_sim = max(max_sim, float(np.max(sim[iu])))
        min_dist = min(min_dist, float(np.min(1.0 - sim[iu])))
    return min_dist, max_sim


def _ot_grad(
    features: np.ndarray, w: np.ndarray, plan: np.ndarray
) -> np.ndarray:
    """Gradient of tr(C^T P) w.r.t. the proxies, P held fixed."""
    fn = features / np.linalg.norm(features, axis=1, keepdims=True)
    wn = np.linalg.norm(w, axis=1)
    u = w / wn[:, None]
    cos = fn @ u.T  # N x K
    grad = np.zeros_like(w)
    for k in range(w.shape[0]):
        # dC(j,k)/dw_k = -(f_hat_j - cos_jk * u_k) / (2 |w_k|)
        d = -(fn - cos[:, k : k + 1] * u[k][None, :]) / (2.0 * wn[k])
        grad[k] = plan[:, k] @ d
    return grad


def train_sim(cfg: TrainConfig) -> TrainReport:
    """Run the seeded training loop and report per-step losses and separation."""
    rng = np.random.default_rng(cfg.seed)
    model = _FeatureModel(cfg, rng)
    bank = _init_proxies(cfg, model, rng)
    vocabs = {cid: VocabQueue(cfg.vocab_capacity, cid) for cid in range(cfg.n_classes)}
    marginals: dict[int, np.ndarray] = {
        cid: np.full(cfg.proxies_per_class, 1.0 / cfg.proxies_per_class)
        for cid in range(cfg.n_classes)
    }
    report = TrainReport(config=cfg)

    for step in range(cfg.steps + 1):
        batches = {
            cid: model.sample(cid, cfg.batch_size, rng) for cid in range(cfg.n_classes)
        }
        for cid in range(cfg.n_classes):
            vocabs[cid].update(list(batches[cid]), cfg.vocab_insert, rng)
        if step > 0 and step % cfg.marginal_cadence == 0:
            for cid in range(cfg.n_classes):
                if len(vocabs[cid]) >= cfg.proxies_per_class:
                    est = estimate_marginals(
                        vocabs[cid], cfg.proxies_per_class, cfg.seed + step
                    )
                    marginals[cid] = est.p

        grads = {cid: np.zeros_like(bank.weights[cid]) for cid in range(cfg.n_classes)}
        loss_det = 0.0
        n_terms = 0
        for cid, feats in batches.items():
            for x in feats:
                for target_cid in range(cfg.n_classes):
                    z, _, dz_dw = multi_proxy_logit(bank, target_cid, x)
                    y = 1.0 if target_cid == cid else 0.0
                    p = 1.0 / (1.0 + np.exp(-z)) if z >= 0 else np.exp(z) / (1 + np.exp(z))
                    loss_det += -(y * np.log(max(p, 1e-12))
                                  + (1 - y) * np.log(max(1 - p, 1e-12)))
                    grads[target_cid] += (p - y) * dz_dw
                    n_terms += 1
        loss_det /= n_terms
        for cid in grads:
            grads[cid] /= n_terms

        loss_ot = 0.0
        if cfg.use_ot:
            for cid, feats in batches.items():
                cost = cost_matrix(feats, bank.weights[cid])
                q = np.full(len(feats), 1.0 / len(feats))
                res = sinkhorn(
                    cost,
                    marginals[cid],
                    q,
                    epsilon=cfg.sinkhorn_epsilon,
                    max_iters=cfg.sinkhorn_max_iters,
                    tol=cfg.sinkhorn_tol,
                )
                loss_ot += transport_cost(cost, res.plan)
                grads[cid] += _ot_grad(feats, bank.weights[cid], res.plan.entries) / cfg.n_classes
            loss_ot /= cfg.n_classes

        instances = [(x, cid) for cid, feats in batches.items() for x in feats]
        loss_cl = contrastive_loss(instances, vocabs)

        min_dist, max_sim = _proxy_separation(bank)
        report.records.append(
            {
                "step": float(step),
                "loss_det": float(loss_det),
                "loss_ot": float(loss_ot),
                "loss_cl": float(loss_cl),
                "min_proxy_distance": float(min_dist),
                "max_proxy_similarity": float(max_sim),
            }
        )
        if step == cfg.steps:
            break
        for cid in range(cfg.n_classes):
            w = bank.weights[cid] - cfg.lr * grads[cid]
            bank.weights[cid] = w / np.linalg.norm(w, axis=1, keepdims=True)

    report.final_weights = {cid: w.copy() for cid, w in bank.weights.items()}
    return report
