"""Pareto-front process discovery with multi-objective binary differential evolution."""
from .causality import CausalityMatrix, Individual, init_population
from .eventlog import EventLog, FollowsStats, Trace, build_stats, parse_csv, parse_traces, parse_xes_minimal, read_log
from .evolution import EvolutionConfig, RunResult, run, run_many, weighted_sum
from .metrics import Evaluator, QualityVector, evaluate

__version__ = "0.1.0"
