"""Busy beaver searches for classical and infinite-time Turing machines."""

from .eptape import EPTape
from .ittm import ITTMachine, OrdinalStage, Snapshot
from .classical import ClassicalMachine
from .transfinite import ExecBudget, run_transfinite

__version__ = "0.1.0"
__all__ = ["EPTape", "ITTMachine", "OrdinalStage", "Snapshot", "ClassicalMachine", "ExecBudget", "run_transfinite"]
