"""Brute-force references for small instances."""

from __future__ import annotations

import numpy as np
from numba import njit

from .dynamics import wrap
from .graph import Graph
from .localsearch import cut_value
from .rounding import round_at

MAX_BRUTE_FORCE_N = 24


class InstanceTooLarge(ValueError):
    pass


@njit(cache=True, nogil=True)
def _gray_maxcut(n, indptr, indices, w):
    # spin n-1 stays at +1 (complement symmetry); bit b of the Gray code is node b
    s = np.ones(n, dtype=np.int64)
    field = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for k in range(indptr[i], indptr[i + 1]):
            field[i] += w[k]
    cut = 0
    best = 0
    best_code = 0
    code = 0
    for step in range(1, 1 << (n - 1)):
        b = 0
        while not (step >> b) & 1:
            b += 1
        # flipping b changes the cut by +sigma_b * field_b
        cut += s[b] * field[b]
        s[b] = -s[b]
        for k in range(indptr[b], indptr[b + 1]):
            field[indices[k]] += 2 * s[b] * w[k]
        code ^= 1 << b
        if cut > best:
            best = cut
            best_code = code
    return best, best_code


def brute_force_maxcut(g: Graph) -> tuple[int, np.ndarray]:
    """Exact max cut by Gray-code enumeration of 2**(n-1) configurations."""
    if g.n > MAX_BRUTE_FORCE_N:
        raise InstanceTooLarge(f"brute force is limited to n <= {MAX_BRUTE_FORCE_N}, got n={g.n}")
    if g.n == 1:
        return 0, np.ones(1, dtype=np.int8)
    best, code = _gray_maxcut(g.n, g.indptr, g.indices, g.csr_weights)
    bits = (int(code) >> np.arange(g.n)) & 1
    config = np.where(bits == 1, -1, 1).astype(np.int8)
    assert cut_value(g, config) == best
    return int(best), config


def exhaustive_rounding(s, g: Graph) -> int:
    """Max cut over one center per arc between consecutive rounding boundaries.

    Membership of node ``i`` can only change where a window edge crosses it,
    i.e. at ``v_i - 1`` and ``v_i + 1`` on the circle. Each arc between
    consecutive boundaries is probed at its midpoint and the cut recomputed
    from scratch.
    """
    x = wrap(s)
    bounds = np.unique(wrap(np.concatenate([x - 1.0, x + 1.0])))
    nxt = np.append(bounds[1:], bounds[0] + 4.0)
    best = 0
    for t in wrap(0.5 * (bounds + nxt)):
        best = max(best, cut_value(g, round_at(x, t)))
    return best
