"""Multistage voting games with threshold-based alternative elimination."""

__version__ = "0.1.0"

from .core import (
    GameConfig,
    InvalidConfig,
    PreferenceOrder,
    as_rational,
    eliminate,
    explicit_preferences,
    guarantees_elimination,
    popularities,
    sincere_choice,
    tally,
    threshold_total,
    update_thresholds,
)
from .engine import (
    AllEliminated,
    CertificateReport,
    EngineOptions,
    GameTrace,
    LengthConvention,
    NonTerminating,
    Outcome,
    ReplayDivergence,
    StageLimitExceeded,
    StageRecord,
    ThresholdRule,
    Winner,
    audit_elimination_guarantee,
    play,
    replay,
    run_stages,
)
from .prefs import Explicit, ProfileSpec, Seed, UniformRandom, generate

__all__ = [
    "AllEliminated",
    "CertificateReport",
    "EngineOptions",
    "Explicit",
    "GameConfig",
    "GameTrace",
    "InvalidConfig",
    "LengthConvention",
    "NonTerminating",
    "Outcome",
    "PreferenceOrder",
    "ProfileSpec",
    "ReplayDivergence",
    "Seed",
    "StageLimitExceeded",
    "StageRecord",
    "ThresholdRule",
    "UniformRandom",
    "Winner",
    "as_rational",
    "audit_elimination_guarantee",
    "eliminate",
    "explicit_preferences",
    "generate",
    "guarantees_elimination",
    "play",
    "popularities",
    "replay",
    "run_stages",
    "sincere_choice",
    "tally",
    "threshold_total",
    "update_thresholds",
]
