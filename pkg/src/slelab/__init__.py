"""slelab: simulation lab for SLE traces and critical planar lattice models."""

__version__ = "0.1.0"

from .loewner import (
    ConformalChain,
    DrivingFunction,
    FlowResult,
    Trace,
    capacity_coefficient,
    chordal_evolve,
    chordal_trace_points,
    elementary_step,
    radial_evolve,
    radial_trace_point,
    radial_trace_points,
    trace_point,
)
