"""Undirected weighted graphs in CSR form, GSet text I/O and Erdos-Renyi sampling."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np


class GraphFormatError(ValueError):
    """Raised when GSet text cannot be turned into a valid graph."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected graph.

    ``edges`` holds one row ``(i, j)`` per undirected edge with ``i < j``
    (0-based, in input order), ``weights`` the matching integer weights. The CSR arrays
    (``indptr``, ``indices``, ``csr_weights``) list every edge in both
    directions with neighbours sorted per node.
    """

    n: int
    edges: np.ndarray
    weights: np.ndarray
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    csr_weights: np.ndarray = field(repr=False)

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    @property
    def total_weight(self) -> int:
        return int(self.weights.sum())

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Contiguous ``(src, dst, float weight)`` arrays for the compiled loops."""
        return (
            np.ascontiguousarray(self.edges[:, 0]),
            np.ascontiguousarray(self.edges[:, 1]),
            self.weights.astype(np.float64),
        )

    def degree(self, i: int) -> int:
        return int(self.indptr[i + 1] - self.indptr[i])

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def edge_list(self) -> list[tuple[int, int, int]]:
        return [(int(i), int(j), int(w)) for (i, j), w in zip(self.edges, self.weights)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and sorted(self.edge_list()) == sorted(other.edge_list())

    __hash__ = None  # type: ignore[assignment]


def from_edges(n: int, edges, weights=None) -> Graph:
    """Build a :class:`Graph` from 0-based ``(i, j)`` or ``(i, j, w)`` triples.

    Each edge is canonicalised to ``i < j``; edge order is preserved. Self-loops, duplicate
    pairs and out-of-range endpoints raise :class:`GraphFormatError`.
    """
    if n < 1:
        raise GraphFormatError(f"node count must be >= 1, got {n}")
    if isinstance(edges, np.ndarray):
        arr = edges.reshape(len(edges), -1) if len(edges) else np.zeros((0, 2), dtype=np.int64)
    else:
        rows = [tuple(e) for e in edges]
        width = {len(r) for r in rows}
        if len(width) > 1:
            raise GraphFormatError("mixed edge tuple lengths")
        arr = np.asarray(rows, dtype=np.int64).reshape(len(rows), -1) if rows else np.zeros((0, 2), dtype=np.int64)
    pairs = arr[:, :2]
    if weights is None:
        weights = arr[:, 2] if arr.shape[1] > 2 else np.ones(len(arr), dtype=np.int64)
    if len(pairs) != len(weights):
        raise GraphFormatError("edge and weight counts differ")

    ij = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    w = np.asarray(weights, dtype=np.int64).reshape(-1)
    if ij.size and (ij.min() < 0 or ij.max() >= n):
        raise GraphFormatError(f"edge endpoint out of range [0, {n})")
    if np.any(ij[:, 0] == ij[:, 1]):
        bad = int(ij[ij[:, 0] == ij[:, 1]][0, 0])
        raise GraphFormatError(f"self-loop at node {bad}")

    lo = np.minimum(ij[:, 0], ij[:, 1])
    hi = np.maximum(ij[:, 0], ij[:, 1])
    if lo.size > 1:
        order = np.lexsort((hi, lo))
        slo, shi = lo[order], hi[order]
        dup = (slo[1:] == slo[:-1]) & (shi[1:] == shi[:-1])
        if dup.any():
            k = int(np.flatnonzero(dup)[0])
            raise GraphFormatError(f"duplicate edge ({slo[k]}, {shi[k]})")
    # input edge order is kept so that text round-trips byte for byte
    canon = np.stack([lo, hi], axis=1) if lo.size else np.zeros((0, 2), dtype=np.int64)

    src = np.concatenate([lo, hi])
    dst = np.concatenate([hi, lo])
    ww = np.concatenate([w, w])
    order = np.lexsort((dst, src))
    src, dst, ww = src[order], dst[order], ww[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])

    arrays = (canon, w, indptr, dst.astype(np.int64), ww.astype(np.int64))
    for a in arrays:
        a.setflags(write=False)
    return Graph(n, *arrays)


def parse_gset(data: bytes | str) -> Graph:
    """Parse GSet text: header ``N M`` then ``M`` lines ``i j w`` (1-based)."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    lines = [ln.strip() for ln in data.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise GraphFormatError("empty input")
    head = lines[0].split()
    if len(head) != 2:
        raise GraphFormatError(f"line 1: expected 'N M', got {lines[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise GraphFormatError(f"line 1: {exc}") from None
    if n < 1 or m < 0:
        raise GraphFormatError(f"line 1: invalid sizes N={n} M={m}")
    if len(lines) - 1 != m:
        raise GraphFormatError(f"header announces {m} edges, found {len(lines) - 1}")

    triples = []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 3:
            raise GraphFormatError(f"line {lineno}: expected 'i j w', got {ln!r}")
        try:
            i, j, w = (int(x) for x in parts)
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer field in {ln!r}") from None
        if not (1 <= i <= n and 1 <= j <= n):
            raise GraphFormatError(f"line {lineno}: node index out of range 1..{n}")
        if i == j:
            raise GraphFormatError(f"line {lineno}: self-loop at node {i}")
        triples.append((i - 1, j - 1, w))
    return from_edges(n, triples)


def read_gset(path: str | Path) -> Graph:
    return parse_gset(Path(path).read_bytes())


def write_gset(g: Graph) -> bytes:
    out = [f"{g.n} {g.m}"]
    out.extend(f"{i + 1} {j + 1} {w}" for (i, j), w in zip(g.edges.tolist(), g.weights.tolist()))
    return ("\n".join(out) + "\n").encode("ascii")


@dataclass(frozen=True)
class ErdosRenyiSpec:
    n: int
    p: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")


def gen_er(spec: ErdosRenyiSpec) -> Graph:
    """Sample G(n, p) with unit weights; one uniform draw per node pair."""
    rng = np.random.default_rng(spec.seed)
    iu, ju = np.triu_indices(spec.n, k=1)
    keep = rng.random(iu.size) < spec.p
    return from_edges(spec.n, np.stack([iu[keep], ju[keep]], axis=1), np.ones(int(keep.sum()), dtype=np.int64))
