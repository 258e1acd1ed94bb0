"""Cut evaluation and the two majority-rule local searches.

A configuration is an int8 array of spins in {-1, +1}. The imbalance of node
``p`` is ``F_p = -sigma_p * sum_n w_pn sigma_n`` (cut minus uncut incident
weight); flipping ``p`` changes the cut by ``-F_p``.

* NMR (node majority rule): flip nodes with ``F_p < 0`` until none is left.
* EMR (edge majority rule): for a cut edge ``(i, j)`` flipping both ends
  changes the cut by ``2 w_ij - F_i - F_j``; such pair flips are applied while
  they pay off, restoring NMR after each one.
"""

from __future__ import annotations

import enum

import numpy as np
from numba import njit

from .graph import Graph


class SearchMode(str, enum.Enum):
    NONE = "none"
    NMR = "nmr"
    NMR_EMR = "nmr+emr"

    @classmethod
    def parse(cls, value: "SearchMode | str") -> "SearchMode":
        if isinstance(value, SearchMode):
            return value
        key = str(value).strip().lower().replace("_", "+")
        for mode in cls:
            if mode.value == key:
                return mode
        raise ValueError(f"unknown post-processing mode {value!r}; expected none, nmr or nmr+emr")


def as_spins(c, n: int | None = None) -> np.ndarray:
    c = np.asarray(c)
    if n is not None and c.shape != (n,):
        raise ValueError(f"configuration has shape {c.shape}, graph has {n} nodes")
    if not np.all((c == 1) | (c == -1)):
        raise ValueError("spins must be exactly +1 or -1")
    return c.astype(np.int8)


def cut_value(g: Graph, c) -> int:
    """Total weight of edges whose endpoints carry opposite spins."""
    c = as_spins(c, g.n)
    if g.m == 0:
        return 0
    cut = c[g.edges[:, 0]] != c[g.edges[:, 1]]
    return int(g.weights[cut].sum())


def ising_energy(g: Graph, c) -> int:
    """``H_I = (1/2) sum_{m,n} A_mn s_m s_n`` = sum over edges of ``w s_i s_j``."""
    c = as_spins(c, g.n).astype(np.int64)
    if g.m == 0:
        return 0
    return int(np.dot(g.weights, c[g.edges[:, 0]] * c[g.edges[:, 1]]))


def imbalances(g: Graph, c) -> np.ndarray:
    c = as_spins(c, g.n).astype(np.int64)
    field = np.zeros(g.n, dtype=np.int64)
    src = np.repeat(np.arange(g.n), np.diff(g.indptr))
    np.add.at(field, src, g.csr_weights * c[g.indices])
    return -c * field


def imbalance(g: Graph, c, p: int) -> int:
    if not 0 <= p < g.n:
        raise IndexError(f"node {p} out of range [0, {g.n})")
    c = as_spins(c, g.n)
    nb = slice(g.indptr[p], g.indptr[p + 1])
    return int(-int(c[p]) * int(np.dot(g.csr_weights[nb], c[g.indices[nb]].astype(np.int64))))


# compiled kernels; `field[i] = sum_j w_ij s_j` is kept in step with `s`

@njit(cache=True, nogil=True)
def _field(s, indptr, indices, w):
    n = s.shape[0]
    out = np.zeros(n, dtype=np.int64)
    for i in range(n):
        acc = 0
        for k in range(indptr[i], indptr[i + 1]):
            acc += w[k] * s[indices[k]]
        out[i] = acc
    return out


@njit(cache=True, nogil=True, inline="always")
def _flip(p, s, field, indptr, indices, w):
    s[p] = -s[p]
    two = 2 * s[p]
    for k in range(indptr[p], indptr[p + 1]):
        field[indices[k]] += two * w[k]


@njit(cache=True, nogil=True)
def _nmr_sweeps(s, field, indptr, indices, w):
    n = s.shape[0]
    gain = 0
    moves = 0
    changed = True
    while changed:
        changed = False
        for p in range(n):
            f = -s[p] * field[p]
            if f < 0:
                _flip(p, s, field, indptr, indices, w)
                gain -= f
                moves += 1
                changed = True
    return gain, moves


@njit(cache=True, nogil=True)
def _nmr_repair(seeds, s, field, indptr, indices, w, queued, stack):
    # local NMR restoration after a pair flip; only nodes whose field moved can violate
    top = 0
    for q in seeds:
        if not queued[q]:
            queued[q] = True
            stack[top] = q
            top += 1
        for k in range(indptr[q], indptr[q + 1]):
            r = indices[k]
            if not queued[r]:
                queued[r] = True
                stack[top] = r
                top += 1
    gain = 0
    moves = 0
    while top > 0:
        top -= 1
        p = stack[top]
        queued[p] = False
        f = -s[p] * field[p]
        if f < 0:
            _flip(p, s, field, indptr, indices, w)
            gain -= f
            moves += 1
            for k in range(indptr[p], indptr[p + 1]):
                r = indices[k]
                if not queued[r]:
                    queued[r] = True
                    stack[top] = r
                    top += 1
    return gain, moves


@njit(cache=True, nogil=True)
def _emr(s, field, ei, ej, we, indptr, indices, w):
    n = s.shape[0]
    queued = np.zeros(n, dtype=np.bool_)
    stack = np.empty(n, dtype=np.int64)
    seeds = np.empty(2, dtype=np.int64)
    gain = 0
    moves = 0
    improved = True
    while improved:
        improved = False
        for e in range(ei.shape[0]):
            i = ei[e]
            j = ej[e]
            if s[i] == s[j]:
                continue
            delta = 2 * we[e] + s[i] * field[i] + s[j] * field[j]
            if delta > 0:
                _flip(i, s, field, indptr, indices, w)
                _flip(j, s, field, indptr, indices, w)
                gain += delta
                moves += 1
                seeds[0] = i
                seeds[1] = j
                g2, m2 = _nmr_repair(seeds, s, field, indptr, indices, w, queued, stack)
                gain += g2
                moves += m2
                improved = True
    return gain, moves


def nmr(g: Graph, c) -> tuple[np.ndarray, int]:
    """Node-majority local search in node order; returns ``(config, gain)``."""
    s = as_spins(c, g.n).copy()
    field = _field(s, g.indptr, g.indices, g.csr_weights)
    gain, _ = _nmr_sweeps(s, field, g.indptr, g.indices, g.csr_weights)
    return s, int(gain)


def emr(g: Graph, c) -> tuple[np.ndarray, int]:
    """Edge-majority pair flips on cut edges, keeping NMR after each accepted flip.

    The input is not required to be NMR-stable, but only nodes touched by a
    pair flip are re-checked, so call :func:`nmr` first for the full guarantee.
    """
    s = as_spins(c, g.n).copy()
    field = _field(s, g.indptr, g.indices, g.csr_weights)
    ei, ej, _ = g.edge_arrays
    gain, _ = _emr(s, field, ei, ej, g.weights, g.indptr, g.indices, g.csr_weights)
    return s, int(gain)


def post_process(g: Graph, c, mode: SearchMode | str) -> tuple[np.ndarray, int]:
    """Apply the requested local search and return ``(config, C_F)``."""
    mode = SearchMode.parse(mode)
    s = as_spins(c, g.n).copy()
    if mode is not SearchMode.NONE:
        field = _field(s, g.indptr, g.indices, g.csr_weights)
        _nmr_sweeps(s, field, g.indptr, g.indices, g.csr_weights)
        if mode is SearchMode.NMR_EMR:
            ei, ej, _ = g.edge_arrays
            _emr(s, field, ei, ej, g.weights, g.indptr, g.indices, g.csr_weights)
    return s, cut_value(g, s)
