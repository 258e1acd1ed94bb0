"""Max-cut solver built on the almost-linear (triangular-kernel) dynamical Ising machine."""

from .dynamics import DynParams, evolve, lyapunov, relaxed_cut, step_euler, wrap
from .graph import ErdosRenyiSpec, Graph, GraphFormatError, from_edges, gen_er, parse_gset, read_gset, write_gset
from .kernels import TRIANGULAR, XY, Kernel, compute_alpha, eval_phi, eval_Phi
from .localsearch import SearchMode, cut_value, emr, imbalance, nmr, post_process
from .oracle import brute_force_maxcut, exhaustive_rounding
from .rounding import RoundingOutcome, circ_dist, expected_cut, optimal_rounding, random_rounding, round_at
from .solver import PRESETS, RunRecord, Schedule, SolveResult, embed_binary, preset, run_once, solve

__version__ = "0.1.0"
