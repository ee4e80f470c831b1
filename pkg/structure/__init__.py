from structure.channels import QuantumChannel, dumps_channel, load_channel, verify_nondisturbance
from structure.ki import (
    DecompositionCheck,
    KIDecomposition,
    MinimalClock,
    ki_decompose,
    minimal_clock,
    block_form_state,
    verify_decomposition,
)
from structure.swp import SWPConfig, SWPReport, swp_demo
from structure.zeno import ZenoConfig, ZenoPoint, measurement_disturbance, zeno_experiment, zeno_general

__all__ = [
    "DecompositionCheck",
    "KIDecomposition",
    "MinimalClock",
    "QuantumChannel",
    "SWPConfig",
    "SWPReport",
    "ZenoConfig",
    "ZenoPoint",
    "dumps_channel",
    "ki_decompose",
    "load_channel",
    "measurement_disturbance",
    "minimal_clock",
    "swp_demo",
    "block_form_state",
    "verify_decomposition",
    "verify_nondisturbance",
    "zeno_experiment",
    "zeno_general",
]
