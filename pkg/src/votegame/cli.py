"""Command-line surface: play one game, run a sweep, or audit the engine.

Exit codes are a stable contract: 0 success, 1 usage or config error,
2 audit violations, 3 a played game was non-terminating.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Optional

from . import audit as audit_mod
from . import experiments, serialize
from .core import GameConfig, InvalidConfig, as_rational
from .engine import (
    AllEliminated,
    EngineOptions,
    LengthConvention,
    NonTerminating,
    ThresholdRule,
    Winner,
    play,
)
from .prefs import Seed, UniformRandom, generate, read_profile_file

SEED_ENV_VAR = "VOTEGAME_SEED"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATIONS = 2
EXIT_NON_TERMINATING = 3


class ConfigFileError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad arguments by default; 2 is reserved for audit
    # violations here, so usage problems must exit 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def default_seed(flag_value: Optional[int]) -> int:
    if flag_value is not None:
        return flag_value
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigFileError(
                f"{SEED_ENV_VAR} must be an integer, got {env!r}"
            ) from exc
    return 0


def _resolve_config_path(arg: str) -> Path:
    if arg.startswith("bundled:"):
        name = arg[len("bundled:"):]
        ref = resources.files("votegame").joinpath("data", f"{name}.json")
        if not ref.is_file():
            raise ConfigFileError(f"no bundled config named {name!r}")
        return Path(str(ref))
    return Path(arg)


def _require_keys(doc: Mapping[str, Any], allowed: set[str], where: str) -> None:
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigFileError(f"{where}: unknown field {sorted(unknown)[0]!r}")


def _parse_engine_options(doc: Mapping[str, Any]) -> EngineOptions:
    _require_keys(
        doc, {"threshold_rule", "length_convention", "max_stages"}, "engine"
    )
    max_stages = doc.get("max_stages")
    if max_stages is not None and (not isinstance(max_stages, int) or max_stages < 1):
        raise ConfigFileError("engine.max_stages: must be a positive integer")
    try:
        return EngineOptions(
            threshold_rule=ThresholdRule(doc.get("threshold_rule", "updating")),
            length_convention=LengthConvention(
                doc.get("length_convention", "rounds_played")
            ),
            max_stages=max_stages,
        )
    except ValueError as exc:
        raise ConfigFileError(f"engine: {exc}") from exc


def load_run_config(
    path: Path, seed_override: Optional[int] = None
) -> tuple[GameConfig, EngineOptions, dict[int, str], Optional[str]]:
    """Parse a run config file into (config, options, id->label, trace_out)."""
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigFileError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigFileError(f"config file is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise ConfigFileError("config file must hold a JSON object")
    _require_keys(
        doc,
        {"alternatives", "weights", "preferences", "thresholds", "engine", "trace_out"},
        "config",
    )

    alt_labels = doc.get("alternatives")
    if (
        not isinstance(alt_labels, list)
        or not alt_labels
        or not all(isinstance(x, str) for x in alt_labels)
    ):
        raise ConfigFileError("alternatives: must be a nonempty list of labels")
    if len(set(alt_labels)) != len(alt_labels):
        raise ConfigFileError("alternatives: labels must be unique")
    label_to_id = {label: i + 1 for i, label in enumerate(alt_labels)}
    id_to_label = {i + 1: label for i, label in enumerate(alt_labels)}
    m = len(alt_labels)

    prefs_doc = doc.get("preferences")
    if isinstance(prefs_doc, list):
        preferences = _label_rankings_to_ids(prefs_doc, label_to_id)
    elif isinstance(prefs_doc, dict) and set(prefs_doc) == {"file"}:
        rankings = read_profile_file(prefs_doc["file"])
        preferences = _label_rankings_to_ids(rankings, label_to_id)
    elif isinstance(prefs_doc, dict) and set(prefs_doc) == {"uniform"}:
        uni = prefs_doc["uniform"]
        _require_keys(
            uni, {"agents", "master_seed", "trial"}, "preferences.uniform"
        )
        agents = uni.get("agents")
        if not isinstance(agents, int) or agents < 1:
            raise ConfigFileError("preferences.uniform.agents: need a positive integer")
        master = uni.get("master_seed")
        if seed_override is not None:
            master = seed_override
        if master is None:
            master = default_seed(None)
        seed = Seed(master, uni.get("trial", 0))
        preferences = tuple(
            p.ranking for p in generate(UniformRandom(agents, m, seed))
        )
    else:
        raise ConfigFileError(
            "preferences: must be a list of rankings, {'uniform': ...}, or {'file': ...}"
        )
    n = len(preferences)

    weights_doc = doc.get("weights", [1] * n)
    if not isinstance(weights_doc, list) or len(weights_doc) != n:
        raise ConfigFileError(f"weights: need one weight per agent ({n})")

    thr_doc = doc.get("thresholds")
    if thr_doc == experiments.THRESHOLD_INIT_RULE:
        thresholds = {x: as_rational(2 * n) / m for x in range(1, m + 1)}
    elif isinstance(thr_doc, dict):
        if set(thr_doc) != set(alt_labels):
            raise ConfigFileError(
                "thresholds: keys must be exactly the alternative labels"
            )
        thresholds = {label_to_id[lab]: as_rational(v) for lab, v in thr_doc.items()}
    else:
        raise ConfigFileError(
            f"thresholds: must be a label map or the string "
            f"{experiments.THRESHOLD_INIT_RULE!r}"
        )

    options = _parse_engine_options(doc.get("engine", {}))
    trace_out = doc.get("trace_out")
    if trace_out is not None and not isinstance(trace_out, str):
        raise ConfigFileError("trace_out: must be a path string")

    try:
        config = GameConfig(
            weights=tuple(weights_doc),
            alternatives=frozenset(range(1, m + 1)),
            preferences=preferences,
            initial_thresholds=thresholds,
        )
    except InvalidConfig as exc:
        raise ConfigFileError(str(exc))
    return config, options, id_to_label, trace_out


def _label_rankings_to_ids(rankings, label_to_id) -> tuple[tuple[int, ...], ...]:
    out = []
    for i, ranking in enumerate(rankings):
        if not isinstance(ranking, list):
            raise ConfigFileError(f"preferences: agent {i + 1} entry is not a list")
        ids = []
        for label in ranking:
            if label not in label_to_id:
                raise ConfigFileError(
                    f"preferences: agent {i + 1} ranks unknown alternative {label!r}"
                )
            ids.append(label_to_id[label])
        out.append(tuple(ids))
    return tuple(out)


def _format_votes(record, id_to_label) -> str:
    return " ".join(
        f"{id_to_label[x]}={r}" for x, r in sorted(record.tally.items())
    )


def cmd_play(args) -> int:
    try:
        path = _resolve_config_path(args.config)
        config, options, labels, trace_out = load_run_config(path, args.seed)
    except (ConfigFileError, InvalidConfig) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if config.trivial_all_eliminated:
        print(
            "warning: every threshold exceeds the total vote weight; "
            "stage 1 eliminates everything"
        )
    trace = play(config, options)
    for record in trace.stages:
        gone = ", ".join(labels[x] for x in sorted(record.eliminated)) or "none"
        line = f"stage {record.stage}: eliminated {gone}"
        if len(record.live_before) <= 20:
            line += f" | votes {_format_votes(record, labels)}"
        print(line)
    if args.trace_out:
        trace_out = args.trace_out
    if trace_out:
        serialize.save_trace(trace, trace_out, labels)
        print(f"trace written to {trace_out}")
    outcome = trace.outcome
    if isinstance(outcome, Winner):
        print(
            f"winner: {labels[outcome.alternative]} "
            f"(rounds played: {trace.rounds_played})"
        )
        return EXIT_OK
    if isinstance(outcome, AllEliminated):
        print(f"all eliminated (rounds played: {trace.rounds_played})")
        return EXIT_OK
    assert isinstance(outcome, NonTerminating)
    print(f"non-terminating at stage {outcome.at_stage}")
    return EXIT_NON_TERMINATING


def _trend_line(result) -> str:
    if result.axis == "agents":
        head = f"row m={result.fixed}"
        peak = f"n={result.peak_key}"
    else:
        head = f"column n={result.fixed}"
        peak = f"m={result.peak_key}"
    if not result.unimodal:
        return f"{head}: not unimodal within tolerance"
    if result.rise_then_fall:
        return f"{head}: rise-then-fall, peak at {peak}"
    return f"{head}: peak at boundary ({peak})"


def cmd_sweep(args) -> int:
    if args.jobs < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        spec = experiments.read_sweep_spec(Path(args.spec))
        if args.seed is not None:
            spec = experiments.sweep_spec_from_dict(
                {**experiments.sweep_spec_to_dict(spec), "master_seed": args.seed}
            )
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = experiments.run_sweep(spec, jobs=args.jobs)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    grid_path = out_dir / "grid.csv"
    report_path = out_dir / "report.json"
    experiments.write_grid_csv(report, grid_path)
    experiments.write_report_json(report, report_path)
    print(f"wrote {grid_path}")
    print(f"wrote {report_path}")
    trends = experiments.trend_check(report)
    for result in trends.rows + trends.columns:
        print(_trend_line(result))
    return EXIT_OK


def cmd_audit(args) -> int:
    if args.trials < 1:
        print("error: --trials must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    override = audit_mod.off_by_one_elimination if args.inject_off_by_one else None
    report = audit_mod.run_audit(
        trials=args.trials,
        master_seed=default_seed(args.seed),
        max_agents=args.max_agents,
        max_alternatives=args.max_alternatives,
        elimination_override=override,
    )
    print(
        f"audited {report.games} games "
        f"({report.stages_checked} stages; guarantee held at "
        f"{report.condition_stages})"
    )
    print(
        f"threshold-mass conservation checked on {report.updating_games} "
        f"updating-rule games"
    )
    for v in report.violations[:10]:
        print(f"violation: game {v.game_index} stage {v.stage}: {v.kind} ({v.detail})")
    print(f"{len(report.violations)} violations")
    return EXIT_OK if report.passed else EXIT_VIOLATIONS


def build_parser() -> _Parser:
    parser = _Parser(
        prog="votegame",
        description="Multistage voting games with alternative elimination.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_play = sub.add_parser("play", help="play one game from a config file")
    p_play.add_argument(
        "config", help="config file path, or bundled:<name> for a packaged fixture"
    )
    p_play.add_argument("--trace-out", help="write the full game trace here")
    p_play.add_argument(
        "--seed", type=int, help="master seed for generated preferences"
    )
    p_play.set_defaults(func=cmd_play)

    p_sweep = sub.add_parser("sweep", help="run a Monte Carlo length sweep")
    p_sweep.add_argument("spec", help="sweep spec JSON file")
    p_sweep.add_argument("--out-dir", default=".", help="output directory")
    p_sweep.add_argument("--jobs", type=int, default=1, help="worker processes")
    p_sweep.add_argument(
        "--seed", type=int, help="override the sweep file's master seed"
    )
    p_sweep.set_defaults(func=cmd_sweep)

    p_audit = sub.add_parser(
        "audit", help="randomized audit of elimination and conservation guarantees"
    )
    p_audit.add_argument("--trials", type=int, default=10_000)
    p_audit.add_argument("--seed", type=int)
    p_audit.add_argument("--max-agents", type=int, default=16)
    p_audit.add_argument("--max-alternatives", type=int, default=12)
    p_audit.add_argument(
        "--inject-off-by-one", action="store_true", help=argparse.SUPPRESS
    )
    p_audit.set_defaults(func=cmd_audit)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
