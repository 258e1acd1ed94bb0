"""Rounding continuous states to spin configurations.

A rounding center ``t`` maps ``v_i`` to +1 when its position on the period-4
circle falls in the half-open arc ``[t - 1, t + 1)`` and to -1 otherwise.
Centers in ``[-1, 1)`` already produce every distinct partition (a shift by
2 only complements the spins).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .dynamics import wrap
from .graph import Graph
from .localsearch import _field, cut_value

PERIOD = 4.0


@dataclass(frozen=True)
class RoundingOutcome:
    config: np.ndarray
    cut: int
    center: float


def round_at(s, t: float) -> np.ndarray:
    """Spins for rounding center ``t`` (reduced into ``[-1, 1)`` if needed)."""
    d = wrap(wrap(s) - t)
    return np.where((d >= -1.0) & (d < 1.0), 1, -1).astype(np.int8)


def circ_dist(a, b):
    """Shortest distance between ``a`` and ``b`` along the period-4 circle."""
    r = np.mod(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)), PERIOD)
    out = np.minimum(r, PERIOD - r)
    return float(out) if out.ndim == 0 else out


def expected_cut(s, g: Graph) -> float:
    """Mean cut over a uniformly random center: ``sum_E w * (2/P) * |v_i - v_j|_P``."""
    if g.m == 0:
        return 0.0
    s = np.asarray(s, dtype=float)
    d = circ_dist(s[g.edges[:, 0]], s[g.edges[:, 1]])
    return float(np.dot(g.weights, d) * (2.0 / PERIOD))


def random_rounding(s, g: Graph, n_rounds: int, rng: np.random.Generator) -> RoundingOutcome:
    """Best of ``n_rounds`` uniformly drawn centers; first maximiser wins ties."""
    if n_rounds < 1:
        raise ValueError(f"n_rounds must be >= 1, got {n_rounds}")
    centers = rng.uniform(-1.0, 1.0, size=n_rounds)
    best = None
    for t in centers:
        c = round_at(s, t)
        cut = cut_value(g, c)
        if best is None or cut > best.cut:
            best = RoundingOutcome(c, cut, float(t))
    return best


def sweep_events(s):
    """Initial spins at ``t = -1`` and the single-flip events met while ``t`` sweeps to 1.

    Returns ``(x, spins0, order, tau)``: wrapped positions, the configuration at
    ``t = -1``, the node order of flips (ties by node index) and each node's
    event position in ``[-1, 1)``. A node flips once, for ``t`` just past its
    event position.
    """
    x = wrap(s)
    neg = x < 0.0
    spins0 = np.where(neg, 1, -1).astype(np.int8)
    tau = np.where(neg, x + 1.0, x - 1.0)
    order = np.argsort(tau, kind="stable")
    return x, spins0, order, tau


@njit(cache=True, nogil=True)
def _sweep(spins, field, order, tau_sorted, indptr, indices, w, running):
    # Applies every flip in order, tracking the cut change. The argmax is only
    # taken at group boundaries: flips sharing a position are not separable by
    # any center.
    n = order.shape[0]
    delta = 0
    best = 0
    best_k = 0
    for k in range(n):
        p = order[k]
        spins[p] = -spins[p]
        two = 2 * spins[p]
        for q in range(indptr[p], indptr[p + 1]):
            field[indices[q]] += two * w[q]
        delta += -spins[p] * field[p]
        running[k] = delta
        if k + 1 < n and tau_sorted[k + 1] == tau_sorted[k]:
            continue
        if delta > best:
            best = delta
            best_k = k + 1
    return best, best_k


def optimal_rounding(s, g: Graph, return_trace: bool = False):
    """Exact best center by sweeping ``t`` over ``[-1, 1)`` in O(N log N + M).

    With ``return_trace=True`` also returns ``(order, running)``: the flip order
    and the cumulative cut change after each flip.
    """
    s = np.asarray(s, dtype=float)
    if s.shape != (g.n,):
        raise ValueError(f"state has shape {s.shape}, graph has {g.n} nodes")
    _, spins0, order, tau = sweep_events(s)
    spins = spins0.copy()
    field = _field(spins, g.indptr, g.indices, g.csr_weights)
    tau_sorted = tau[order]
    running = np.empty(g.n, dtype=np.int64)
    _, best_k = _sweep(spins, field, order, tau_sorted, g.indptr, g.indices, g.csr_weights, running)

    config = spins0.copy()
    config[order[:best_k]] *= -1
    if best_k == 0:
        center = -1.0
    else:
        hi = tau_sorted[best_k] if best_k < g.n else 1.0
        center = 0.5 * (tau_sorted[best_k - 1] + hi)
    out = RoundingOutcome(config, cut_value(g, config), float(center))
    if return_trace:
        return out, (order, running)
    return out
