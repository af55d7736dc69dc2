"""Semi-supervised clustering via aggregation of a data-derived Markov chain.

Data points become states of a reversible Markov chain whose transitions
follow a Gaussian similarity kernel with a kNN-derived bandwidth. A
partition of the points is scored by an information-theoretic aggregation
cost; a Hartigan-style local search minimizes it under hard must-link and
cannot-link constraints, optionally annealing the cost's trade-off
parameter to escape poor local minima.
"""

from .constraints import (CliqueIndex, ConstraintSet, corrupt_labels,
                          from_labels, func_cannot, func_must, greedy_coloring,
                          propagate, read_constraint_file, sample_pairs,
                          sample_side_info, violations, write_constraint_file)
from .data import (Dataset, generate_circles, load_csv, pca_reduce, write_csv,
                   zscore_normalize)
from .errors import (ChainclustError, ContradictoryConstraints, DegenerateScale,
                     DimensionError, EmptyDataset, InfeasibleSideInfo,
                     InvalidInitialization, NoIncorrectLabelAvailable,
                     ParseError, ShapeError)
from .evaluation import (ExperimentSpec, RunSummary, nmi, run_experiment,
                         sweep, sweep_table)
from .markov import (AggregateStats, CostTerms, TransitionModel,
                     aggregate_joint, apply_move, build_from_weights,
                     build_transition, cost, cost_terms, dump_model,
                     knn_scale, move_delta)
from .partition import Partition
from .solver import SolverConfig, solve_annealed, solve_sequential

__version__ = "0.1.0"

__all__ = [
    "AggregateStats", "ChainclustError", "CliqueIndex", "ConstraintSet",
    "ContradictoryConstraints", "CostTerms", "Dataset", "DegenerateScale",
    "DimensionError", "EmptyDataset", "ExperimentSpec", "InfeasibleSideInfo",
    "InvalidInitialization", "NoIncorrectLabelAvailable", "ParseError",
    "Partition", "RunSummary", "ShapeError", "SolverConfig", "TransitionModel",
    "aggregate_joint", "apply_move", "build_from_weights", "build_transition",
    "corrupt_labels", "cost", "cost_terms", "dump_model", "from_labels",
    "func_cannot", "func_must", "generate_circles", "greedy_coloring",
    "knn_scale", "load_csv", "move_delta", "nmi", "pca_reduce", "propagate",
    "read_constraint_file", "run_experiment", "sample_pairs",
    "sample_side_info", "solve_annealed", "solve_sequential", "sweep",
    "sweep_table", "violations", "write_constraint_file", "write_csv",
    "zscore_normalize",
]
