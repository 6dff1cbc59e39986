"""Nested entanglement purification and quantum repeater modelling."""

from .bell import BellDiagonalState, PHI_PLUS, epsilon_state, make_werner, twirl
from .connection import ConnectionStrategy, connect_chain, connect_chain_werner, connect_pair
from .noise import NoiseParams
from .purification import (
    FixpointReport,
    NonConvergence,
    ResourceReport,
    TargetUnreachable,
    iterate_to_fixpoint,
    resources_ab,
    resources_c,
    scheme_a_fixpoints,
    scheme_a_step,
    scheme_b_fixpoints,
    scheme_b_step,
    scheme_c_step,
)
from .repeater import LoopFailure, RepeaterConfig, RepeaterReport, build_time, check_loop, run_nested
from .timing import TimeReport, TimingParams

__version__ = "0.1.0"
