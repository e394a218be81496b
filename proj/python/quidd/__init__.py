"""Quantum information decision diagrams."""

from ._core import (
    DimensionMismatch,
    Error,
    ParseError,
    ResourceLimit,
    State,
    classify,
    dense_simulate,
    grover,
    iterations_for,
    operator_sizes,
    qft_nodes,
    run_cli,
    simulate,
)

__all__ = [
    "DimensionMismatch",
    "Error",
    "ParseError",
    "ResourceLimit",
    "State",
    "classify",
    "dense_simulate",
    "grover",
    "iterations_for",
    "operator_sizes",
    "qft_nodes",
    "run_cli",
    "simulate",
]
