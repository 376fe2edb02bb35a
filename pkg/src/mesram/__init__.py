"""Behavioral device-to-architecture simulator of a magneto-electric
FET based non-volatile SRAM with in-memory X(N)OR computing."""

from .cell import CellState, MarginReport, OpCost, SignalVector, op_cost
from .device import (
    LlgParams,
    MagnetizationState,
    MefetParams,
    MefetState,
    Resistance,
)
from .hierarchy import Hierarchy, HierarchySpec, build_hierarchy
from .ledger import EnergyLatencyLedger, account
from .subarray import RblLevel, SenseAmpConfig, SenseMode, SubArray
from .variation import McResult, VariationSpec

__version__ = "0.1.0"

__all__ = [
    "CellState",
    "EnergyLatencyLedger",
    "Hierarchy",
    "HierarchySpec",
    "LlgParams",
    "MagnetizationState",
    "MarginReport",
    "McResult",
    "MefetParams",
    "MefetState",
    "OpCost",
    "RblLevel",
    "Resistance",
    "SenseAmpConfig",
    "SenseMode",
    "SignalVector",
    "SubArray",
    "VariationSpec",
    "account",
    "build_hierarchy",
    "op_cost",
]
