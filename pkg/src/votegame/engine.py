"""Repeated-game driver: stages, traces, termination and its audit.

The engine loops single stages until at most one alternative is live.  A
stage that eliminates nothing reproduces its exact state next round (voting
is deterministic and preferences fixed), so the game would repeat forever;
the engine detects that immediately and stops with a ``NonTerminating``
outcome instead of looping.  Consequently every run returns after at most
(initial alternatives - 1) stages.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import AbstractSet, Callable, Iterable, Mapping, Optional, Union

from . import core
from .core import AgentId, AlternativeId, GameConfig

Chooser = Callable[[AbstractSet[AlternativeId]], AlternativeId]
EliminationRule = Callable[
    [Mapping[AlternativeId, int], Mapping[AlternativeId, Fraction]],
    tuple[frozenset[AlternativeId], frozenset[AlternativeId]],
]


class ThresholdRule(enum.Enum):
    """How thresholds evolve between stages."""

    UPDATING = "updating"  # survivors absorb eliminated threshold mass
    STATIC = "static"      # thresholds never change


class LengthConvention(enum.Enum):
    """How a finished game's length is reported.

    ROUNDS_PLAYED counts rounds of voting that actually happened; a game
    decided in its first round has length 1.  ROUNDS_PLUS_FINAL adds one
    terminal confirmation round to every decided game.
    """

    ROUNDS_PLAYED = "rounds_played"
    ROUNDS_PLUS_FINAL = "rounds_plus_final"


@dataclass(frozen=True)
class EngineOptions:
    threshold_rule: ThresholdRule = ThresholdRule.UPDATING
    length_convention: LengthConvention = LengthConvention.ROUNDS_PLAYED
    # None means (initial alternatives + 8): unreachable if the engine is
    # correct, present purely to turn bugs into loud failures.
    max_stages: Optional[int] = None
    # Test seam for audit negative controls; never serialized.
    elimination_override: Optional[EliminationRule] = field(
        default=None, compare=False, repr=False
    )


@dataclass(frozen=True)
class StageRecord:
    """Everything that happened in one round of voting."""

    stage: int
    live_before: frozenset[AlternativeId]
    thresholds_before: dict[AlternativeId, Fraction]
    profile: dict[AgentId, AlternativeId]
    tally: dict[AlternativeId, int]
    eliminated: frozenset[AlternativeId]
    thresholds_after: dict[AlternativeId, Fraction]  # survivors only

    @property
    def survivors(self) -> frozenset[AlternativeId]:
        return self.live_before - self.eliminated


@dataclass(frozen=True, slots=True)
class Winner:
    alternative: AlternativeId


@dataclass(frozen=True, slots=True)
class AllEliminated:
    pass


@dataclass(frozen=True, slots=True)
class NonTerminating:
    at_stage: int


Outcome = Union[Winner, AllEliminated, NonTerminating]


@dataclass(frozen=True)
class GameTrace:
    config: GameConfig
    options: EngineOptions
    stages: tuple[StageRecord, ...]
    outcome: Outcome

    @property
    def rounds_played(self) -> int:
        return len(self.stages)

    def length(self, convention: Optional[LengthConvention] = None) -> int:
        """Game length under the given (or the trace's own) convention.

        A non-terminating game has no terminal confirmation round, so both
        conventions report the rounds actually played.
        """
        if convention is None:
            convention = self.options.length_convention
        k = len(self.stages)
        if convention is LengthConvention.ROUNDS_PLUS_FINAL and not isinstance(
            self.outcome, NonTerminating
        ):
            return k + 1
        return k


class StageLimitExceeded(RuntimeError):
    """The safety cap tripped; this indicates an engine bug, not a game state."""


class ReplayDivergence(RuntimeError):
    """A replayed game did not reproduce its trace bit-for-bit."""


def run_stages(
    weights: Mapping[AgentId, int],
    alternatives: Iterable[AlternativeId],
    initial_thresholds: Mapping[AlternativeId, Fraction],
    choosers: Mapping[AgentId, Chooser],
    options: EngineOptions = EngineOptions(),
) -> tuple[list[StageRecord], Outcome]:
    """Drive a repeated game; choosers[agent](live) yields that agent's vote.

    This is the single game loop behind both ``play`` (materialized
    preference orders) and the sweep harness (lazily revealed orders).
    """
    live = frozenset(alternatives)
    thresholds = dict(initial_thresholds)
    cap = options.max_stages if options.max_stages is not None else len(live) + 8
    eliminate = options.elimination_override or core.eliminate
    updating = options.threshold_rule is ThresholdRule.UPDATING
    stages: list[StageRecord] = []
    k = 0
    while len(live) >= 2:
        k += 1
        if k > cap:
            raise StageLimitExceeded(
                f"stage {k} exceeds the safety cap of {cap} stages"
            )
        profile = {agent: choose(live) for agent, choose in choosers.items()}
        counts = core.tally(profile, weights, live)
        survivors, eliminated = eliminate(counts, thresholds)
        if updating and survivors:
            after = core.update_thresholds(thresholds, counts, survivors, eliminated)
        else:
            after = {x: thresholds[x] for x in survivors}
        stages.append(
            StageRecord(k, live, thresholds, profile, counts, eliminated, after)
        )
        if len(survivors) <= 1:
            outcome: Outcome = (
                Winner(next(iter(survivors))) if survivors else AllEliminated()
            )
            return stages, outcome
        if not eliminated:
            # Same live set, same thresholds, same deterministic votes next
            # round: the game is a fixed point and would repeat forever.
            return stages, NonTerminating(at_stage=k)
        live = survivors
        thresholds = after
    if live:
        return stages, Winner(next(iter(live)))
    return stages, AllEliminated()


def play(config: GameConfig, options: EngineOptions = EngineOptions()) -> GameTrace:
    """Play one full repeated game from a config and record its trace."""
    choosers = {
        agent: partial(core.sincere_choice, prefs)
        for agent, prefs in enumerate(config.preferences, start=1)
    }
    stages, outcome = run_stages(
        config.weight_map(),
        config.alternatives,
        config.initial_thresholds,
        choosers,
        options,
    )
    return GameTrace(config, options, tuple(stages), outcome)


def replay(trace: GameTrace) -> GameTrace:
    """Re-run a trace's config and insist on a bit-identical result."""
    again = play(trace.config, trace.options)
    if again.stages != trace.stages or again.outcome != trace.outcome:
        for ours, theirs in zip(again.stages, trace.stages):
            if ours != theirs:
                raise ReplayDivergence(
                    f"replay diverged at stage {theirs.stage}"
                )
        raise ReplayDivergence(
            f"replay diverged after stage {min(len(again.stages), len(trace.stages))}"
        )
    return again


@dataclass(frozen=True)
class StageCertificate:
    stage: int
    condition_held: bool   # threshold mass strictly exceeded total vote weight
    eliminated_count: int

    @property
    def ok(self) -> bool:
        return not self.condition_held or self.eliminated_count >= 1


@dataclass(frozen=True)
class CertificateReport:
    """Stage-by-stage audit: a held elimination guarantee must eliminate."""

    stages: tuple[StageCertificate, ...]

    @property
    def passed(self) -> bool:
        return all(s.ok for s in self.stages)

    @property
    def first_violation(self) -> Optional[int]:
        for s in self.stages:
            if not s.ok:
                return s.stage
        return None


def audit_elimination_guarantee(trace: GameTrace) -> CertificateReport:
    """Check every stage where total thresholds exceeded total votes.

    Whenever the guarantee condition held at a stage, at least one
    alternative must have been eliminated there; this report proves it for a
    given trace (or pinpoints the first stage where it failed).
    """
    weights = trace.config.weight_map()
    certs = []
    for s in trace.stages:
        held = core.guarantees_elimination(s.thresholds_before, weights)
        certs.append(StageCertificate(s.stage, held, len(s.eliminated)))
    return CertificateReport(tuple(certs))
