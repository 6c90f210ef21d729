"""Exact finite model of two-parameter martingales on the boundary of a
triangle building, realized on a truncated p-adic Heisenberg group."""

from .coweights import LAM1, LAM2, ZERO, Coweight, Root, dist, leq, pairing
from .exact import BoundaryFunction
from .filtration import Col, Join, Level, Partition, PartitionSpec, Row, cond_expect, \
    expectation_operator, partition
from .heisenberg import AtomSpace, ConfigError, GroupElement, ModelConfig, build_atom_space, \
    cell_measure, group_inv, group_mul
from .linalg import LinearOperator

__version__ = "0.1.0"

__all__ = [
    "LAM1", "LAM2", "ZERO", "Coweight", "Root", "dist", "leq", "pairing",
    "BoundaryFunction", "Col", "Join", "Level", "Partition", "PartitionSpec", "Row",
    "cond_expect", "expectation_operator", "partition", "AtomSpace", "ConfigError",
    "GroupElement", "ModelConfig", "build_atom_space", "cell_measure", "group_inv",
    "group_mul", "LinearOperator",
]
