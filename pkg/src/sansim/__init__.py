"""Trace-driven simulator for socially-aware opportunistic networks.

The package splits into: domain types (`model`), per-node social state
(`social`) and the similarity/utility math (`similarity`), forwarding
strategies (`routers`), the discrete-event core (`engine`), trace/profile
ingestion (`ingest`), metrics (`metrics`), deterministic fixtures (`synth`),
experiment orchestration (`experiments`), figure rendering (`plots`), and
the command line (`cli`).
"""

from .engine import EngineConfig, Simulation, run
from .ingest import (
    NormalizedTrace,
    ProfileStore,
    parse_profiles,
    parse_trace,
    serialize_trace,
)
from .metrics import MetricsReport, MetricsSnapshot, export
from .model import ContactEvent, Message, SimilarityTriple, SlotClock
from .routers import ROUTER_NAMES, PisConfig, PisRouter, Router, make_router
from .similarity import SimilarityParams

__version__ = "0.1.0"

__all__ = [
    "EngineConfig",
    "Simulation",
    "run",
    "NormalizedTrace",
    "ProfileStore",
    "parse_profiles",
    "parse_trace",
    "serialize_trace",
    "MetricsReport",
    "MetricsSnapshot",
    "export",
    "ContactEvent",
    "Message",
    "SimilarityTriple",
    "SlotClock",
    "ROUTER_NAMES",
    "PisConfig",
    "PisRouter",
    "Router",
    "make_router",
    "SimilarityParams",
    "__version__",
]
