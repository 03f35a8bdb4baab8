"""Cosine cost matrices, Sinkhorn-Knopp transport plans, and an exact oracle.

Sinkhorn scaling runs in the log domain (log-sum-exp updates) so small
regularization strengths do not underflow. Zero entries in either marginal
are legal; the corresponding plan rows/columns are identically zero.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

_EXACT_CAP = 4


def cost_matrix(features: np.ndarray, proxies: np.ndarray) -> np.ndarray:
    """(1 - cosine similarity) / 2 between every feature and proxy; in [0,1]."""
    features = np.asarray(features, dtype=float)
    proxies = np.asarray(proxies, dtype=float)
    fn = np.linalg.norm(features, axis=1)
    pn = np.linalg.norm(proxies, axis=1)
    if np.any(fn == 0) or np.any(pn == 0):
        raise ValueError("zero-norm vector in cost_matrix input")
    sim = (features / fn[:, None]) @ (proxies / pn[:, None]).T
    return np.clip((1.0 - sim) / 2.0, 0.0, 1.0)


@dataclass
class TransportPlan:
    entries: np.ndarray  # N x K, nonnegative
    row_marginals: np.ndarray  # length N (instances)
    col_marginals: np.ndarray  # length K (proxies)


@dataclass
class SinkhornResult:
    plan: TransportPlan
    iterations: int
    marginal_violation: float
    converged: bool


def _check_marginal(v: np.ndarray, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if np.any(v < 0) or abs(v.sum() - 1.0) > 1e-9:
        raise ValueError(f"{name} must be a probability vector, got sum {v.sum()}")
    return v


def sinkhorn(
    cost: np.ndarray,
    p: np.ndarray,
    q: np.ndarray,
    epsilon: float = 0.05,
    max_iters: int = 1000,
    tol: float = 1e-6,
) -> SinkhornResult:
    """Entropic-regularized plan with column marginal p and row marginal q."""
    cost = np.asarray(cost, dtype=float)
    n, k = cost.shape
    p = _check_marginal(p, "p")
    q = _check_marginal(q, "q")
    if p.shape != (k,) or q.shape != (n,):
        raise ValueError(f"marginal shapes {p.shape}/{q.shape} do not match cost {cost.shape}")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")

    with np.errstate(divide="ignore"):
        logp = np.log(p)
        logq = np.log(q)
    log_kernel = -cost / epsilon
    u = np.zeros(n)
    v = np.zeros(k)
    zero_rows = q == 0
    zero_cols = p == 0

    def plan_of(u: np.ndarray, v: np.ndarray) -> np.ndarray:
        logP = u[:, None] + log_kernel + v[None, :]
        logP[zero_rows, :] = -np.inf
        logP[:, zero_cols] = -np.inf
        return np.exp(logP)

    def violation(P: np.ndarray) -> float:
        return max(
            float(np.max(np.abs(P.sum(axis=1) - q))),
            float(np.max(np.abs(P.sum(axis=0) - p))),
        )

    iters = 0
    viol = violation(plan_of(u, v))
    while viol >= tol and iters < max_iters:
        with np.errstate(invalid="ignore"):
            u = logq - _logsumexp(log_kernel + v[None, :], axis=1)
            u[zero_rows] = -np.inf
            v = logp - _logsumexp(log_kernel + u[:, None], axis=0)
            v[zero_cols] = -np.inf
        iters += 1
        viol = violation(plan_of(u, v))
    P = plan_of(u, v)
    return SinkhornResult(
        plan=TransportPlan(P, q, p),
        iterations=iters,
        marginal_violation=viol,
        converged=viol < tol,
    )


def _logsumexp(a: np.ndarray, axis: int) -> np.ndarray:
    m = np.max(a, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        return np.log(np.sum(np.exp(a - m), axis=axis)) + np.squeeze(m, axis=axis)


def transport_cost(cost: np.ndarray, plan: TransportPlan) -> float:
    """tr(C^T P)."""
    return float(np.sum(np.asarray(cost) * plan.entries))


def ot_loss(class_costs: Sequence[np.ndarray], class_plans: Sequence[TransportPlan]) -> float:
    """Mean of tr(C^T P) over classes."""
    if len(class_costs) != len(class_plans) or not class_costs:
        raise ValueError("need one plan per class, at least one class")
    total = 0.0
    for c, plan in zip(class_costs, class_plans):
        c = np.asarray(c)
        if c.shape != plan.entries.shape:
            raise ValueError(f"cost shape {c.shape} != plan shape {plan.entries.shape}")
        total += float(np.sum(c * plan.entries))
    return total / len(class_costs)


@lru_cache(maxsize=32)
def _basis_data(n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    # Equality constraints: n row sums then k column sums, flattened row-major.
    A = np.zeros((n + k, n * k))
    for j in range(n):
        A[j, j * k : (j + 1) * k] = 1.0
    for c in range(k):
        A[n + c, c::k] = 1.0
    # One constraint is redundant (both sides sum to 1); drop the last.
    A = A[:-1]
    m = n + k - 1
    combos = np.array(list(itertools.combinations(range(n * k), m)))
    return A, combos


def exact_ot(cost: np.ndarray, p: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, float]:
    """Exact minimizer of tr(C^T P) by enumerating basic feasible solutions.

    Deliberately capped at 4x4: this is the small-instance oracle the
    iterative solver is checked against.
    """
    cost = np.asarray(cost, dtype=float)
    n, k = cost.shape
    if n > _EXACT_CAP or k > _EXACT_CAP:
        raise ValueError(f"exact oracle limited to {_EXACT_CAP}x{_EXACT_CAP}, got {n}x{k}")
    p = _check_marginal(p, "p")
    q = _check_marginal(q, "q")
    A, combos = _basis_data(n, k)
    b = np.concatenate([q, p])[:-1]
    # Batched basis solves: B[i] = A[:, combos[i]]
    B = A.T[combos].transpose(0, 2, 1)
    dets = np.linalg.det(B)
    ok = np.abs(dets) > 1e-9
    rhs = np.broadcast_to(b[:, None], (int(ok.sum()), b.size, 1))
    x = np.linalg.solve(B[ok], rhs)[:, :, 0]
    feasible = np.all(x >= -1e-9, axis=1)
    if not np.any(feasible):
        raise ValueError("no basic feasible solution found (inconsistent marginals)")
    c_flat = cost.ravel()
    costs = np.einsum("ij,ij->i", c_flat[combos[ok]], x)
    costs[~feasible] = np.inf
    best = int(np.argmin(costs))
    plan = np.zeros(n * k)
    plan[combos[ok][best]] = np.clip(x[best], 0.0, None)
    return plan.reshape(n, k), float(costs[best])
