"""Exact coupling solvers: assignment for uniform square instances, LP otherwise.

For equal-size uniform marginals the optimum is a permutation (Birkhoff),
so those instances go through a dedicated assignment routine. General
marginals are solved as a transportation LP; a vertex solution is requested
so the returned plan has at most n + n' - 1 support entries.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linear_sum_assignment, linprog

from ..errors import InstanceTooLargeError, InvalidArgumentError
from ..measures import TransportPlan

MAX_DENSE_ROWS = 4096       # larger instances belong to multiscale/sinkhorn
BRUTE_FORCE_LIMIT = 8


@dataclass(frozen=True)
class ExactSolution:
    plan: TransportPlan
    objective: float


def _check_cost(cost: np.ndarray) -> np.ndarray:
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2:
        raise InvalidArgumentError("cost must be a 2D matrix")
    if not np.all(np.isfinite(cost)) or cost.min() < 0:
        raise InvalidArgumentError("cost entries must be finite and nonnegative")
    if cost.shape[0] > MAX_DENSE_ROWS:
        raise InstanceTooLargeError(
            f"{cost.shape[0]} rows exceeds the dense limit {MAX_DENSE_ROWS}; "
            "use the multiscale or sinkhorn solver")
    return cost


def solve_assignment(cost: np.ndarray) -> ExactSolution:
    """Globally optimal permutation plan for a square uniform instance.

    The objective is sum_ij c_ij * pi_ij with pi the permutation matrix
    scaled by 1/n. Ties between optimal permutations resolve deterministically
    (fixed scanning order of the underlying augmenting-path method).
    """
    cost = _check_cost(cost)
    n, m = cost.shape
    if n != m:
        raise InvalidArgumentError(
            f"assignment needs a square cost, got {n}x{m}; use solve_lp")
    rows, cols = linear_sum_assignment(cost)
    mass = np.full(n, 1.0 / n)
    plan = TransportPlan(rows, cols, mass, n, n, is_permutation=True)
    return ExactSolution(plan, float(cost[rows, cols].sum() / n))


def solve_lp(cost: np.ndarray, p_weights, q_weights) -> ExactSolution:
    """Optimal coupling for general marginals via a transportation LP.

    Uses a simplex method so the optimum is a basic (vertex) solution with
    sparse support. Marginals must each sum to 1 with strictly positive
    entries.
    """
    cost = _check_cost(cost)
    p = np.asarray(p_weights, dtype=float)
    q = np.asarray(q_weights, dtype=float)
    n, m = cost.shape
    if p.shape != (n,) or q.shape != (m,):
        raise InvalidArgumentError("marginal lengths must match the cost shape")
    if np.any(p <= 0) or np.any(q <= 0):
        raise InvalidArgumentError("marginal weights must be strictly positive")
    if abs(p.sum() - 1.0) > 1e-8 or abs(q.sum() - 1.0) > 1e-8:
        raise InvalidArgumentError("marginals must each sum to 1")
    row_con = sparse.kron(sparse.eye(n, format="csr"), np.ones((1, m)), format="csr")
    col_con = sparse.kron(np.ones((1, n)), sparse.eye(m, format="csr"), format="csr")
    # drop the last (redundant) column constraint for numerical stability
    A = sparse.vstack([row_con, col_con[:-1]], format="csr")
    b = np.concatenate([p, q[:-1]])
    res = linprog(cost.ravel(), A_eq=A, b_eq=b, bounds=(0, None), method="highs-ds")
    if res.status != 0:
        raise InvalidArgumentError(f"transportation LP failed: {res.message}")
    x = res.x.reshape(n, m)
    keep = np.argwhere(x > 0)
    plan = TransportPlan(keep[:, 0], keep[:, 1], x[keep[:, 0], keep[:, 1]], n, m)
    plan.check_marginals(p, q)
    return ExactSolution(plan, float((cost * x).sum()))


def solve_lp_restricted(cost_fn, pairs: np.ndarray, p_weights, q_weights):
    """Transportation LP restricted to an explicit support set.

    ``pairs`` is an (k, 2) index array of admissible (i, j) entries and
    ``cost_fn(pairs)`` returns their costs. Returns (plan, objective) or
    None when the restricted problem is infeasible.
    """
    p = np.asarray(p_weights, dtype=float)
    q = np.asarray(q_weights, dtype=float)
    n, m = len(p), len(q)
    k = len(pairs)
    c = np.asarray(cost_fn(pairs), dtype=float)
    rows = sparse.csr_matrix((np.ones(k), (pairs[:, 0], np.arange(k))), shape=(n, k))
    cols = sparse.csr_matrix((np.ones(k), (pairs[:, 1], np.arange(k))), shape=(m, k))
    A = sparse.vstack([rows, cols[:-1]], format="csr")
    b = np.concatenate([p, q[:-1]])
    res = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs-ds")
    if res.status == 2:
        return None
    if res.status != 0:
        raise InvalidArgumentError(f"restricted LP failed: {res.message}")
    keep = res.x > 0
    plan = TransportPlan(pairs[keep, 0], pairs[keep, 1], res.x[keep], n, m)
    return plan, float(c @ res.x)


def brute_force_min(cost: np.ndarray) -> float:
    """Exact minimum of (1/n) sum_i c(i, sigma(i)) over all permutations.

    Test oracle only; refuses n > 8.
    """
    cost = np.asarray(cost, dtype=float)
    n, m = cost.shape
    if n != m:
        raise InvalidArgumentError("brute force needs a square cost")
    if n > BRUTE_FORCE_LIMIT:
        raise InstanceTooLargeError(f"n={n} exceeds the brute-force limit "
                                    f"{BRUTE_FORCE_LIMIT} (n! blowup)")
    best = min(sum(cost[i, s] for i, s in enumerate(sigma))
               for sigma in itertools.permutations(range(n)))
    return float(best / n)
