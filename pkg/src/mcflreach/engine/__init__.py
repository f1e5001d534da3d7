"""Saturation-based MCFL reachability over normal-form grammars."""

from .solver import (
    EngineConfig,
    ReachResult,
    apply_pruning,
    cycle_eliminate,
    extract_witness,
    member,
    solve,
    solve_with_cycle_elimination,
)
from .kernels import available_kernels, default_kernel

__all__ = [
    "EngineConfig",
    "ReachResult",
    "apply_pruning",
    "available_kernels",
    "cycle_eliminate",
    "default_kernel",
    "extract_witness",
    "member",
    "solve",
    "solve_with_cycle_elimination",
]
