"""Ground cost assembly and signal transformations.

The transport cost between graph points (x, f(x)) and (y, g(y)) is

    c(x, y) = |x - y|_p^p / lam + |f(x) - g(y)|_p^p

computed in p-th-power units throughout; distances take a single final
1/p root. ``lam`` trades horizontal (domain) against vertical (intensity)
transport: small lam forces near-identity plans, large lam lets mass move
freely in the domain.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, InvalidArgumentError, UnsupportedError
from .measures import DiscreteMeasure, Signal


class LambdaLimit(enum.Enum):
    """Symbolic endpoints of the lam parameter.

    ZERO routes distance evaluation to the plain L^p distance and INFINITY
    to optimal transport between value histograms; both limits are exact,
    so no near-limit finite solve is attempted.
    """

    ZERO = "zero"
    INFINITY = "infinity"


@dataclass(frozen=True)
class CostParams:
    p: float = 2.0
    lam: float | LambdaLimit = 1.0

    def __post_init__(self):
        if self.p < 1:
            raise InvalidArgumentError(f"p must be >= 1, got {self.p}")
        if not isinstance(self.lam, LambdaLimit):
            if not (self.lam > 0 and np.isfinite(self.lam)):
                raise InvalidArgumentError(f"lam must be positive and finite, got {self.lam}")

    @property
    def finite(self) -> bool:
        return not isinstance(self.lam, LambdaLimit)


def _pairwise_power(a: np.ndarray, b: np.ndarray, p: float) -> np.ndarray:
    """sum_k |a_ik - b_jk|^p for all (i, j)."""
    if p == 2.0:
        # |a|^2 + |b|^2 - 2ab, clipped against tiny negative roundoff
        sq = (a * a).sum(1)[:, None] + (b * b).sum(1)[None, :] - 2.0 * (a @ b.T)
        return np.maximum(sq, 0.0)
    diff = np.abs(a[:, None, :] - b[None, :, :])
    if p == 1.0:
        return diff.sum(-1)
    return (diff ** p).sum(-1)


def build_cost(f: Signal, g: Signal, params: CostParams) -> np.ndarray:
    """Dense (n, n') matrix of graph-transport costs in p-th-power units."""
    if not params.finite:
        raise InvalidArgumentError("build_cost needs a finite lam; symbolic limits "
                                   "are handled by the distance layer")
    if f.domain_dim != g.domain_dim:
        raise InvalidArgumentError(
            f"domain dims differ: {f.domain_dim} vs {g.domain_dim}")
    if f.channel_dim != g.channel_dim:
        raise InvalidArgumentError(
            f"channel dims differ: {f.channel_dim} vs {g.channel_dim}")
    pos = _pairwise_power(f.measure.points, g.measure.points, params.p)
    val = _pairwise_power(f.values, g.values, params.p)
    return pos / params.lam + val


def shared_support(f: Signal, g: Signal, tol: float = 1e-9) -> bool:
    return (f.size == g.size and f.domain_dim == g.domain_dim
            and np.max(np.abs(f.measure.points - g.measure.points)) <= tol
            and np.max(np.abs(f.measure.weights - g.measure.weights)) <= tol)


def lp_distance(f: Signal, g: Signal, p: float = 2.0) -> float:
    """Weighted L^p distance between signals on the same discretization.

    No interpolation is attempted: supports and weights must match.
    """
    if p < 1:
        raise InvalidArgumentError(f"p must be >= 1, got {p}")
    if f.channel_dim != g.channel_dim:
        raise InvalidArgumentError("channel dims differ")
    if not shared_support(f, g):
        raise InvalidArgumentError("lp_distance requires identical supports and "
                                   "weights; no interpolation is performed")
    diff = np.abs(f.values - g.values)
    per_point = (diff ** p).sum(1) if p != 1.0 else diff.sum(1)
    return float((f.measure.weights @ per_point) ** (1.0 / p))


def _forward_differences(signal: Signal) -> np.ndarray:
    """Forward finite differences along a sorted 1D support.

    The last point repeats its neighbor's difference so the output has one
    derivative row per support point.
    """
    if signal.domain_dim != 1:
        raise UnsupportedError("finite differences are defined for 1D signals only")
    x = signal.measure.points[:, 0]
    if signal.size < 2:
        raise InvalidArgumentError("need at least 2 points to differentiate")
    if np.any(np.diff(x) <= 0):
        raise InvalidArgumentError("support must be sorted strictly by coordinate")
    dv = np.diff(signal.values, axis=0) / np.diff(x)[:, None]
    return np.vstack([dv, dv[-1:]])


def derivative_signal(f: Signal) -> Signal:
    """Signal whose values are the finite-difference derivative of ``f``."""
    return Signal(f.measure, _forward_differences(f))


def augment_with_derivatives(f: Signal, k: int, weights=None) -> Signal:
    """Append k orders of scaled finite-difference derivatives as channels.

    The output has m*(k+1) channels ordered (w0*f, w1*f', ..., wk*f^(k)).
    ``weights`` are k+1 positive scale factors (default all ones). Transport
    distances on the augmented signal weigh value and derivative mismatch
    jointly, Sobolev style.
    """
    if k < 1:
        raise InvalidArgumentError("k must be >= 1")
    if f.size < k + 1:
        raise InvalidArgumentError(f"need at least {k+1} points for {k} derivatives")
    if weights is None:
        weights = np.ones(k + 1)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (k + 1,) or np.any(weights <= 0):
        raise InvalidArgumentError("weights must be k+1 positive reals")
    blocks = [weights[0] * f.values]
    cur = f
    for order in range(1, k + 1):
        cur = derivative_signal(cur)
        blocks.append(weights[order] * cur.values)
    return Signal(f.measure, np.hstack(blocks))


def ot_normalize(dataset) -> list[Signal]:
    """Shift-and-scale a dataset of single-channel signals into unit-mass form.

    Subtracts the dataset-wide minimum value from every signal and divides
    each by its own weighted integral, so every output is nonnegative and
    integrates to 1. This is the standard preprocessing that makes signed
    signals admissible for optimal transport.
    """
    dataset = list(dataset)
    if not dataset:
        raise InvalidArgumentError("empty dataset")
    if any(s.channel_dim != 1 for s in dataset):
        raise InvalidArgumentError("ot_normalize handles single-channel signals")
    beta = min(float(s.values.min()) for s in dataset)
    out = []
    for s in dataset:
        shifted = s.values - beta
        total = float(s.measure.weights @ shifted[:, 0])
        if total <= 0:
            raise DegenerateInputError(
                "signal is constant at the dataset minimum; its shifted integral "
                "vanishes and it cannot be normalized")
        out.append(Signal(s.measure, shifted / total))
    return out


def discrete_lipschitz(f: Signal, p: float = 2.0) -> float:
    """Sup over support points of the p-norm of the finite-difference derivative.

    For 1D grid signals this bounds |f(x)-f(y)|_p / |x-y| over all support
    pairs (by telescoping), which is the constant controlling when small-lam
    transport degenerates to the identity plan.
    """
    d = np.abs(_forward_differences(f)[:-1])
    per_point = d.sum(1) if p == 1.0 else (d ** p).sum(1) ** (1.0 / p)
    return float(per_point.max())
