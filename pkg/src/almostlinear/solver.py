"""Full solve runs: evolve, round, post-process, repeat."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .dynamics import DynParams, evolve, lyapunov, random_state, relaxed_cut, wrap
from .graph import Graph
from .kernels import TRIANGULAR, Kernel, as_kernel
from .localsearch import SearchMode, cut_value, post_process
from .rounding import expected_cut, optimal_rounding, random_rounding

RESTARTS = ("fresh_random", "perturb_best")


def parse_rounding(spec: str) -> tuple[str, int]:
    """``"optimal"`` -> ``("optimal", 0)``; ``"random:32"`` -> ``("random", 32)``."""
    spec = spec.strip().lower()
    if spec == "optimal":
        return "optimal", 0
    if spec.startswith("random"):
        _, _, nr = spec.partition(":")
        n_rounds = int(nr) if nr else 1
        if n_rounds < 1:
            raise ValueError(f"random rounding needs at least one center, got {n_rounds}")
        return "random", n_rounds
    raise ValueError(f"unknown rounding {spec!r}; expected 'optimal' or 'random:NR'")


@dataclass(frozen=True)
class Schedule:
    steps: int = 250
    dt_coef: float = 140.0
    Ks: float = 1.0
    repetitions: int = 100
    rounding: str = "optimal"
    post: SearchMode = SearchMode.NMR_EMR
    restart: str = "fresh_random"
    noise_amp: float = 0.1
    seed: int = 0
    kernel: Kernel = field(default=TRIANGULAR)

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.noise_amp < 0:
            raise ValueError("noise_amp must be >= 0")
        if self.dt_coef <= 0:
            raise ValueError("dt_coef must be positive")
        if self.restart not in RESTARTS:
            raise ValueError(f"restart must be one of {RESTARTS}, got {self.restart!r}")
        parse_rounding(self.rounding)
        object.__setattr__(self, "post", SearchMode.parse(self.post))
        object.__setattr__(self, "kernel", as_kernel(self.kernel))

    def dyn_params(self, n: int) -> DynParams:
        return DynParams(Ks=self.Ks, dt=self.dt_coef / n, steps=self.steps, kernel=self.kernel)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["post"] = self.post.value
        d["kernel"] = self.kernel.kind
        return d


PRESETS = {
    # 250 steps of 140/N, best of 100 fresh starts
    "quality": Schedule(),
    # 50 steps of 50/N, 30 restarts from a perturbed best-so-far
    "scaling": Schedule(steps=50, dt_coef=50.0, repetitions=30, restart="perturb_best"),
}


def preset(name: str, **overrides) -> Schedule:
    try:
        base = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; expected one of {sorted(PRESETS)}") from None
    return replace(base, **overrides)


@dataclass
class RunRecord:
    run_index: int
    rounding: str
    cut_rounded: int
    C_F: int
    center: float
    expected_cut: float
    H_final: float
    relaxed_cut_final: float
    t_dynamics_s: float
    t_rounding_s: float
    t_post_s: float
    config: np.ndarray = field(repr=False, compare=False)

    TIMING_FIELDS = ("t_dynamics_s", "t_rounding_s", "t_post_s")

    def to_dict(self) -> dict:
        key = "C_O" if self.rounding == "optimal" else "C_R"
        return {
            "run_index": self.run_index,
            "rounding": self.rounding,
            key: self.cut_rounded,
            "C_F": self.C_F,
            "center": self.center,
            "expected_cut": self.expected_cut,
            "H_final": self.H_final,
            "relaxed_cut_final": self.relaxed_cut_final,
            "t_dynamics_s": self.t_dynamics_s,
            "t_rounding_s": self.t_rounding_s,
            "t_post_s": self.t_post_s,
        }


@dataclass
class SolveResult:
    best_config: np.ndarray
    best_cut: int
    records: list[RunRecord]

    @property
    def best_so_far(self) -> list[int]:
        return np.maximum.accumulate([r.C_F for r in self.records]).tolist()


def run_rng(seed: int, run_index: int) -> np.random.Generator:
    """Independent PCG64 stream for run ``run_index`` of a solve seeded with ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(run_index,)))


def embed_binary(c, noise_amp: float, rng: np.random.Generator) -> np.ndarray:
    """Place spins on the anisotropy minima (+1 -> 0, -1 -> 2) plus uniform noise."""
    if noise_amp < 0:
        raise ValueError("noise_amp must be >= 0")
    c = np.asarray(c)
    v = np.where(c > 0, 0.0, 2.0)
    if noise_amp > 0:
        v = v + rng.uniform(-noise_amp, noise_amp, size=v.shape)
    return wrap(v)


def run_once(g: Graph, sch: Schedule, init, rng: np.random.Generator | None = None,
             run_index: int = 0) -> RunRecord:
    """Evolve from ``init``, round, post-process and time each stage."""
    if rng is None:
        rng = run_rng(sch.seed, run_index)
    kind, n_rounds = parse_rounding(sch.rounding)

    t0 = time.perf_counter()
    state = evolve(init, g, sch.dyn_params(g.n))
    t1 = time.perf_counter()
    if kind == "optimal":
        rounded = optimal_rounding(state, g)
    else:
        rounded = random_rounding(state, g, n_rounds, rng)
    t2 = time.perf_counter()
    config, c_f = post_process(g, rounded.config, sch.post)
    t3 = time.perf_counter()

    return RunRecord(
        run_index=run_index,
        rounding=kind,
        cut_rounded=rounded.cut,
        C_F=c_f,
        center=rounded.center,
        expected_cut=expected_cut(state, g),
        H_final=lyapunov(state, g, sch.Ks, sch.kernel),
        relaxed_cut_final=relaxed_cut(state, g, sch.kernel),
        t_dynamics_s=t1 - t0,
        t_rounding_s=t2 - t1,
        t_post_s=t3 - t2,
        config=config,
    )


def _fresh_run(g: Graph, sch: Schedule, run_index: int) -> RunRecord:
    rng = run_rng(sch.seed, run_index)
    return run_once(g, sch, random_state(g.n, rng), rng, run_index)


def solve(g: Graph, sch: Schedule, workers: int = 1) -> SolveResult:
    """Repeat :func:`run_once` and keep the best post-processed cut.

    Fresh-random restarts are independent and may run on ``workers`` threads;
    every run draws from its own stream keyed by ``(seed, run_index)`` so the
    records do not depend on the worker count. ``perturb_best`` restarts
    depend on the previous best and always run sequentially.
    """
    records: list[RunRecord] = []
    if sch.restart == "fresh_random":
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                records = list(pool.map(lambda i: _fresh_run(g, sch, i), range(sch.repetitions)))
        else:
            records = [_fresh_run(g, sch, i) for i in range(sch.repetitions)]
        best = max(records, key=lambda r: (r.C_F, -r.run_index))
        return SolveResult(best.config, best.C_F, records)

    best_config = np.ones(g.n, dtype=np.int8)
    best_cut = cut_value(g, best_config)
    for i in range(sch.repetitions):
        rng = run_rng(sch.seed, i)
        init = embed_binary(best_config, sch.noise_amp, rng)
        rec = run_once(g, sch, init, rng, i)
        records.append(rec)
        if rec.C_F > best_cut:
            best_cut, best_config = rec.C_F, rec.config
    return SolveResult(best_config, best_cut, records)
