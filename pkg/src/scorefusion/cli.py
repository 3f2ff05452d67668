"""Command-line front end: fit Bayes models, score transaction batches, and
combine ad-hoc masses for inspection.

Exit codes: 0 success, 1 nothing scored (or total conflict in ``combine``),
2 input or parse problem, 3 fitting failed on a degenerate history.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from typing import Sequence

from .bayes import BayesModel, LabeledHistory, fit
from .combination import CombinationMode, combine_all
from .errors import (
    DegenerateClass,
    EmptyHistory,
    FusionError,
    ParseError,
    TotalConflict,
)
from .evidence import MassFunction
from .fileio import (
    load_batch,
    load_history_csv,
    load_rule_config,
    save_model,
)
from .scoring import (
    FRAUD_FRAME,
    BayesCombiner,
    Combiner,
    DempsterCombiner,
    RuleSet,
    ScoreReport,
    Transaction,
    rank,
    score,
)

_MODES = {"standard": CombinationMode.STANDARD, "paper": CombinationMode.SIMPLIFIED}

_REPORT_FIELDS = (
    "rank",
    "id",
    "bel_fraud",
    "pl_fraud",
    "point_estimate",
    "conflict",
    "n_sources",
    "suspicious",
    "confirmed",
    "status",
    "error",
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scorefusion",
        description="Fuse fraud-evidence scores into calibrated, ranked verdicts.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    p_fit = subparsers.add_parser(
        "fit", help="fit a Bayes model from a labeled history CSV"
    )
    p_fit.add_argument("history", help="CSV with header txn_id,label,rule_id")
    p_fit.add_argument("model_out", help="where to write the fitted model (JSON)")
    p_fit.add_argument(
        "--smoothing",
        type=float,
        default=0.0,
        metavar="ALPHA",
        help="additive smoothing for likelihoods (default 0)",
    )
    p_fit.set_defaults(handler=cmd_fit)

    p_score = subparsers.add_parser(
        "score", help="score a transaction batch against a rule config"
    )
    p_score.add_argument("config", help="rule config (JSON)")
    p_score.add_argument("batch", help="transaction batch (one JSON object per line)")
    p_score.add_argument(
        "--output",
        choices=("table", "csv", "jsonl"),
        default="table",
        help="report format (default table)",
    )
    p_score.add_argument(
        "--combiner",
        choices=("ds", "bayes"),
        help="override the config's combiner family",
    )
    p_score.add_argument(
        "--mode",
        choices=tuple(_MODES),
        help="override the Dempster combination mode",
    )
    p_score.add_argument(
        "--threshold", type=float, help="override the config's detection threshold"
    )
    p_score.set_defaults(handler=cmd_score)

    p_combine = subparsers.add_parser(
        "combine", help="combine inline masses and print the fused result"
    )
    p_combine.add_argument(
        "--mass",
        action="append",
        default=[],
        metavar="f=<x>,g=<y>[,u=<z>]",
        help="one source's masses on fraud, genuine, and uncertainty (repeatable)",
    )
    p_combine.add_argument(
        "--mode",
        choices=tuple(_MODES),
        default="standard",
        help="combination mode (default standard)",
    )
    p_combine.set_defaults(handler=cmd_combine)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EmptyHistory as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DegenerateClass as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FusionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    raise SystemExit(main())


# --- fit ---------------------------------------------------------------


def cmd_fit(args: argparse.Namespace) -> int:
    history = load_history_csv(args.history)
    model = fit(history, args.smoothing)
    save_model(model, args.model_out)
    _print_fit_summary(history, model, args.model_out)
    return 0


def _print_fit_summary(history: LabeledHistory, model: BayesModel, out_path: str) -> None:
    print(
        f"fitted on {history.total} transactions "
        f"({history.fraud_count} fraud, {history.genuine_count} genuine)"
    )
    print(
        f"prior_fraud={model.prior_fraud:.4f}  prior_genuine={model.prior_genuine:.4f}  "
        f"smoothing={model.smoothing:g}"
    )
    if model.likelihoods:
        width = max(len(eid) for eid in model.likelihoods)
        width = max(width, len("rule"))
        print(f"{'rule':<{width}}  p_given_fraud  p_given_genuine")
        for eid, likelihood in sorted(model.likelihoods.items()):
            print(
                f"{eid:<{width}}  {likelihood.p_given_fraud:>13.4f}  "
                f"{likelihood.p_given_genuine:>15.4f}"
            )
    print(f"model written to {out_path}")


# --- score -------------------------------------------------------------


def cmd_score(args: argparse.Namespace) -> int:
    ruleset = _apply_overrides(load_rule_config(args.config), args)
    transactions = load_batch(args.batch)
    scored: list[ScoreReport] = []
    side: list[tuple[Transaction, str, str | None]] = []
    for txn in transactions:
        if not txn.triggered:
            side.append((txn, "skipped", None))
            continue
        try:
            scored.append(score(ruleset, txn))
        except FusionError as exc:
            side.append((txn, "error", type(exc).__name__))
    ranked = rank(scored)
    emit = {"table": _emit_table, "csv": _emit_csv, "jsonl": _emit_jsonl}[args.output]
    emit(ranked, side, _combiner_name(ruleset.combiner), ruleset.threshold)
    return 0 if ranked else 1


def _apply_overrides(ruleset: RuleSet, args: argparse.Namespace) -> RuleSet:
    combiner = ruleset.combiner
    if args.combiner == "bayes":
        if not isinstance(combiner, BayesCombiner):
            raise ParseError(
                f"{args.config}: --combiner bayes needs a config with a 'model' reference"
            )
        if args.mode:
            raise ParseError("--mode does not apply to the bayes combiner")
    elif args.combiner == "ds":
        mode = _MODES[args.mode] if args.mode else CombinationMode.STANDARD
        if args.mode is None and isinstance(combiner, DempsterCombiner):
            mode = combiner.mode
        combiner = DempsterCombiner(mode)
    elif args.mode:
        if not isinstance(combiner, DempsterCombiner):
            raise ParseError("--mode only applies to a Dempster combiner; use --combiner ds")
        combiner = DempsterCombiner(_MODES[args.mode])
    threshold = ruleset.threshold
    if args.threshold is not None:
        if not 0.0 <= args.threshold <= 1.0:
            raise ParseError(f"--threshold must be in [0, 1], got {args.threshold!r}")
        threshold = args.threshold
    if combiner is ruleset.combiner and threshold == ruleset.threshold:
        return ruleset
    return replace(ruleset, combiner=combiner, threshold=threshold)


def _combiner_name(combiner: Combiner) -> str:
    if isinstance(combiner, BayesCombiner):
        return "bayes"
    return "ds-standard" if combiner.mode is CombinationMode.STANDARD else "ds-paper"


def _emit_table(
    ranked: list[ScoreReport],
    side: list[tuple[Transaction, str, str | None]],
    combiner_name: str,
    threshold: float,
) -> None:
    print(f"combiner={combiner_name} threshold={threshold:.4f}")
    ids = [r.transaction_id for r in ranked] + [t.id for t, _, _ in side]
    id_width = max([len("id")] + [len(i) for i in ids])
    header = (
        f"{'rank':>4}  {'id':<{id_width}}  {'bel_fraud':>9}  {'pl_fraud':>9}  "
        f"{'point':>9}  {'conflict':>9}  {'n':>3}  {'suspicious':>10}  "
        f"{'confirmed':>9}  status"
    )
    print(header)
    for r in ranked:
        print(
            f"{r.rank:>4}  {r.transaction_id:<{id_width}}  {r.bel_fraud:>9.4f}  "
            f"{r.pl_fraud:>9.4f}  {r.point_estimate:>9.4f}  {r.conflict:>9.4f}  "
            f"{r.n_sources:>3}  {_yesno(r.suspicious):>10}  "
            f"{_yesno(r.confirmed):>9}  scored"
        )
    for txn, status, error_name in side:
        marker = status if error_name is None else f"{status}:{error_name}"
        print(
            f"{'-':>4}  {txn.id:<{id_width}}  {'-':>9}  {'-':>9}  {'-':>9}  "
            f"{'-':>9}  {len(txn.triggered):>3}  {'-':>10}  {'-':>9}  {marker}"
        )


def _emit_csv(
    ranked: list[ScoreReport],
    side: list[tuple[Transaction, str, str | None]],
    combiner_name: str,
    threshold: float,
) -> None:
    print(f"# combiner={combiner_name} threshold={threshold!r}")
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(_REPORT_FIELDS)
    for r in ranked:
        writer.writerow(
            [
                r.rank,
                r.transaction_id,
                repr(r.bel_fraud),
                repr(r.pl_fraud),
                repr(r.point_estimate),
                repr(r.conflict),
                r.n_sources,
                _json_bool(r.suspicious),
                _json_bool(r.confirmed),
                "scored",
                "",
            ]
        )
    for txn, status, error_name in side:
        writer.writerow(
            ["", txn.id, "", "", "", "", len(txn.triggered), "", "", status, error_name or ""]
        )


def _emit_jsonl(
    ranked: list[ScoreReport],
    side: list[tuple[Transaction, str, str | None]],
    combiner_name: str,
    threshold: float,
) -> None:
    print(json.dumps({"combiner": combiner_name, "threshold": threshold}))
    for r in ranked:
        record = {
            "rank": r.rank,
            "id": r.transaction_id,
            "bel_fraud": r.bel_fraud,
            "pl_fraud": r.pl_fraud,
            "point_estimate": r.point_estimate,
            "conflict": r.conflict,
            "n_sources": r.n_sources,
            "suspicious": r.suspicious,
            "confirmed": r.confirmed,
            "status": "scored",
        }
        if r.payload:
            record["payload"] = r.payload
        print(json.dumps(record))
    for txn, status, error_name in side:
        record = {"id": txn.id, "n_sources": len(txn.triggered), "status": status}
        if error_name is not None:
            record["error"] = error_name
        if txn.payload:
            record["payload"] = txn.payload
        print(json.dumps(record))


def _yesno(flag: bool) -> str:
    return "yes" if flag else "no"


def _json_bool(flag: bool) -> str:
    return "true" if flag else "false"


# --- combine -----------------------------------------------------------


def cmd_combine(args: argparse.Namespace) -> int:
    if len(args.mass) < 2:
        raise ParseError("need at least two --mass flags to combine")
    sources = [_parse_mass_flag(text) for text in args.mass]
    try:
        outcome = combine_all(sources, _MODES[args.mode])
    except TotalConflict as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    fraud = FRAUD_FRAME.singleton("fraud")
    genuine = FRAUD_FRAME.singleton("genuine")
    omega = FRAUD_FRAME.omega
    interval = outcome.mass.interval(fraud)
    print(f"mode={args.mode} sources={len(sources)}")
    steps = " ".join(f"{k:.4f}" for k in outcome.step_conflicts)
    print(f"K per step: {steps}")
    print(f"K_total: {outcome.conflict:.4f}")
    print("combined mass:")
    print(f"  m(fraud)     = {outcome.mass.mass(fraud):.4f}")
    print(f"  m(genuine)   = {outcome.mass.mass(genuine):.4f}")
    print(f"  m(uncertain) = {outcome.mass.mass(omega):.4f}")
    print(f"bel(fraud) = {interval.bel:.4f}")
    print(f"pl(fraud)  = {interval.pl:.4f}")
    return 0


def _parse_mass_flag(text: str) -> MassFunction:
    values: dict[str, float] = {}
    for part in text.split(","):
        key, sep, raw = part.partition("=")
        key = key.strip()
        if not sep or key not in ("f", "g", "u"):
            raise ParseError(
                f"--mass {text!r}: expected f=<x>,g=<y>[,u=<z>], got part {part!r}"
            )
        if key in values:
            raise ParseError(f"--mass {text!r}: component {key!r} given twice")
        try:
            values[key] = float(raw)
        except ValueError:
            raise ParseError(f"--mass {text!r}: {raw.strip()!r} is not a number") from None
    if "f" not in values or "g" not in values:
        raise ParseError(f"--mass {text!r}: both f=<x> and g=<y> are required")
    try:
        return MassFunction(
            FRAUD_FRAME,
            [
                (FRAUD_FRAME.singleton("fraud"), values["f"]),
                (FRAUD_FRAME.singleton("genuine"), values["g"]),
                (FRAUD_FRAME.omega, values.get("u", 0.0)),
            ],
        )
    except FusionError as exc:
        raise ParseError(f"--mass {text!r}: {exc}") from exc
