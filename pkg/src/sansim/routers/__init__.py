"""Routing strategies and the factory used by the CLI/experiment layer."""

from __future__ import annotations

from .base import COPY, DELIVER, HANDOFF, SPLIT, Router, TransferDirective
from .baselines import (
    EpidemicRouter,
    ProphetConfig,
    ProphetRouter,
    SimBetRouter,
    SprayAndWaitRouter,
)
from .pis import PisConfig, PisRouter, split_copies

ROUTER_NAMES = ("pis", "epidemic", "prophet", "simbet", "snw")


def make_router(
    name: str,
    pis_config: PisConfig | None = None,
    prophet_config: ProphetConfig | None = None,
    snw_copies: int = 8,
    simbet_balance: float = 0.5,
) -> Router:
    if name == "pis":
        return PisRouter(pis_config or PisConfig())
    if name == "epidemic":
        return EpidemicRouter()
    if name == "prophet":
        return ProphetRouter(prophet_config or ProphetConfig())
    if name == "simbet":
        return SimBetRouter(simbet_balance)
    if name == "snw":
        return SprayAndWaitRouter(snw_copies)
    raise ValueError(f"unknown router {name!r}; choices: {ROUTER_NAMES}")


__all__ = [
    "COPY",
    "DELIVER",
    "HANDOFF",
    "SPLIT",
    "Router",
    "TransferDirective",
    "EpidemicRouter",
    "ProphetConfig",
    "ProphetRouter",
    "SimBetRouter",
    "SprayAndWaitRouter",
    "PisConfig",
    "PisRouter",
    "split_copies",
    "ROUTER_NAMES",
    "make_router",
]
