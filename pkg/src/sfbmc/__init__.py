"""Bounded model checking of Stateflow-style programs via symbolic execution."""
from .bmc import BOUNDED_SAFE, UNKNOWN, VIOLATED, BmcResult, bmc_check
from .concrete import run_trace, sos_init, sos_step
from .counterexample import Counterexample, replay_validate
from .parser import ModelError, ParseError, load_property_file, parse_model, parse_property
from .printer import print_model
from .simulation import check_simulation
from .sts import STS, build_sts, check_partition
from .symbolic import SymbolicEngine, ssos_step
from .syntax import InvariantProperty, Program
from .validate import validate_model

__version__ = "0.1.0"

__all__ = [
    "BOUNDED_SAFE", "UNKNOWN", "VIOLATED", "BmcResult", "bmc_check",
    "run_trace", "sos_init", "sos_step", "Counterexample", "replay_validate",
    "ModelError", "ParseError", "load_property_file", "parse_model", "parse_property",
    "print_model", "check_simulation", "STS", "build_sts", "check_partition",
    "SymbolicEngine", "ssos_step", "InvariantProperty", "Program", "validate_model",
]
