"""Lossless JSON round-tripping for configs and game traces.

Rational values travel as exact "numerator/denominator" strings (plain
integers stay plain), never as floats, so a loaded trace compares equal to
the one that was saved.  Documents are emitted with sorted keys and a fixed
layout, making serialized output byte-stable across runs.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Optional

from .core import GameConfig, InvalidConfig, as_rational
from .engine import (
    AllEliminated,
    EngineOptions,
    GameTrace,
    LengthConvention,
    NonTerminating,
    Outcome,
    StageRecord,
    ThresholdRule,
    Winner,
)

TRACE_FORMAT = "votegame-trace-v1"


def rational_to_str(value: Fraction) -> str:
    return str(value)


def rational_from_str(text: str) -> Fraction:
    return as_rational(text)


def _thresholds_to_dict(thresholds: Mapping[int, Fraction]) -> dict[str, str]:
    return {str(x): rational_to_str(f) for x, f in sorted(thresholds.items())}


def _thresholds_from_dict(doc: Mapping[str, str]) -> dict[int, Fraction]:
    return {int(x): rational_from_str(f) for x, f in doc.items()}


def config_to_dict(config: GameConfig) -> dict[str, Any]:
    return {
        "weights": list(config.weights),
        "alternatives": sorted(config.alternatives),
        "preferences": [list(p.ranking) for p in config.preferences],
        "initial_thresholds": _thresholds_to_dict(config.initial_thresholds),
    }


def config_from_dict(doc: Mapping[str, Any]) -> GameConfig:
    try:
        return GameConfig(
            weights=tuple(doc["weights"]),
            alternatives=frozenset(doc["alternatives"]),
            preferences=tuple(tuple(p) for p in doc["preferences"]),
            initial_thresholds=_thresholds_from_dict(doc["initial_thresholds"]),
        )
    except KeyError as exc:
        raise InvalidConfig(f"config document is missing field {exc}") from exc


def options_to_dict(options: EngineOptions) -> dict[str, Any]:
    return {
        "threshold_rule": options.threshold_rule.value,
        "length_convention": options.length_convention.value,
        "max_stages": options.max_stages,
    }


def options_from_dict(doc: Mapping[str, Any]) -> EngineOptions:
    return EngineOptions(
        threshold_rule=ThresholdRule(doc.get("threshold_rule", "updating")),
        length_convention=LengthConvention(
            doc.get("length_convention", "rounds_played")
        ),
        max_stages=doc.get("max_stages"),
    )


def outcome_to_dict(outcome: Outcome) -> dict[str, Any]:
    if isinstance(outcome, Winner):
        return {"kind": "winner", "alternative": outcome.alternative}
    if isinstance(outcome, AllEliminated):
        return {"kind": "all_eliminated"}
    if isinstance(outcome, NonTerminating):
        return {"kind": "non_terminating", "at_stage": outcome.at_stage}
    raise TypeError(f"not an outcome: {outcome!r}")


def outcome_from_dict(doc: Mapping[str, Any]) -> Outcome:
    kind = doc.get("kind")
    if kind == "winner":
        return Winner(doc["alternative"])
    if kind == "all_eliminated":
        return AllEliminated()
    if kind == "non_terminating":
        return NonTerminating(doc["at_stage"])
    raise InvalidConfig(f"unknown outcome kind: {kind!r}")


def stage_to_dict(record: StageRecord) -> dict[str, Any]:
    return {
        "stage": record.stage,
        "live_before": sorted(record.live_before),
        "thresholds_before": _thresholds_to_dict(record.thresholds_before),
        "profile": {str(a): x for a, x in sorted(record.profile.items())},
        "tally": {str(x): r for x, r in sorted(record.tally.items())},
        "eliminated": sorted(record.eliminated),
        "thresholds_after": _thresholds_to_dict(record.thresholds_after),
    }


def stage_from_dict(doc: Mapping[str, Any]) -> StageRecord:
    return StageRecord(
        stage=doc["stage"],
        live_before=frozenset(doc["live_before"]),
        thresholds_before=_thresholds_from_dict(doc["thresholds_before"]),
        profile={int(a): x for a, x in doc["profile"].items()},
        tally={int(x): r for x, r in doc["tally"].items()},
        eliminated=frozenset(doc["eliminated"]),
        thresholds_after=_thresholds_from_dict(doc["thresholds_after"]),
    )


def trace_to_dict(
    trace: GameTrace, labels: Optional[Mapping[int, str]] = None
) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "format": TRACE_FORMAT,
        "config": config_to_dict(trace.config),
        "options": options_to_dict(trace.options),
        "stages": [stage_to_dict(s) for s in trace.stages],
        "outcome": outcome_to_dict(trace.outcome),
    }
    if labels is not None:
        doc["labels"] = {str(x): name for x, name in sorted(labels.items())}
    return doc


def trace_from_dict(doc: Mapping[str, Any]) -> GameTrace:
    if doc.get("format") != TRACE_FORMAT:
        raise InvalidConfig(f"not a {TRACE_FORMAT} document")
    return GameTrace(
        config=config_from_dict(doc["config"]),
        options=options_from_dict(doc["options"]),
        stages=tuple(stage_from_dict(s) for s in doc["stages"]),
        outcome=outcome_from_dict(doc["outcome"]),
    )


def trace_labels(doc: Mapping[str, Any]) -> Optional[dict[int, str]]:
    labels = doc.get("labels")
    if labels is None:
        return None
    return {int(x): name for x, name in labels.items()}


def dumps(doc: Mapping[str, Any]) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def save_trace(
    trace: GameTrace, path: str | Path, labels: Optional[Mapping[int, str]] = None
) -> None:
    Path(path).write_text(dumps(trace_to_dict(trace, labels)), encoding="utf-8")


def load_trace(path: str | Path) -> GameTrace:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return trace_from_dict(doc)
