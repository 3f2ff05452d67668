"""File formats: rule configs, transaction batches, history CSVs, model files.

All structured files are JSON (decimal numbers, UTF-8); the history input is
CSV. Parse failures raise :class:`ParseError` with the file and, where it
applies, the line or rule that is at fault.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any

from .bayes import BayesModel, EvidenceCounts, LabeledHistory, Likelihood
from .combination import CombinationMode
from .errors import ParseError
from .scoring import BayesCombiner, DempsterCombiner, RuleSet, RuleSpec, Transaction

# v1 config surface is pinned to the fraud/genuine frame.
FRAME_LABELS = ("fraud", "genuine")

HISTORY_HEADER = ("txn_id", "label", "rule_id")

MODEL_FORMAT = "scorefusion-model/1"

_COMBINER_MODES = {
    "ds-standard": CombinationMode.STANDARD,
    "ds-paper": CombinationMode.SIMPLIFIED,
}


def load_history_csv(path: str | Path) -> LabeledHistory:
    """Aggregate a trigger-level CSV (txn_id,label,rule_id) into counts.

    One row per trigger; transactions without triggers appear once with an
    empty rule_id. Duplicate (txn, rule) rows collapse; conflicting labels
    for one transaction are an error.
    """
    path = Path(path)
    labels: dict[str, str] = {}
    triggers: set[tuple[str, str]] = set()
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise ParseError(f"{path}: empty file, expected header {','.join(HISTORY_HEADER)}")
        if tuple(h.strip() for h in header) != HISTORY_HEADER:
            raise ParseError(f"{path}:1: expected header {','.join(HISTORY_HEADER)}")
        for row in reader:
            line = reader.line_num
            if not row or all(not field.strip() for field in row):
                continue
            if len(row) != 3:
                raise ParseError(f"{path}:{line}: expected 3 fields, got {len(row)}")
            txn_id, label, rule_id = (field.strip() for field in row)
            if not txn_id:
                raise ParseError(f"{path}:{line}: empty txn_id")
            if label not in ("fraud", "genuine"):
                raise ParseError(
                    f"{path}:{line}: label must be 'fraud' or 'genuine', got {label!r}"
                )
            previous = labels.get(txn_id)
            if previous is not None and previous != label:
                raise ParseError(
                    f"{path}:{line}: transaction {txn_id!r} labeled both "
                    f"{previous!r} and {label!r}"
                )
            labels[txn_id] = label
            if rule_id:
                triggers.add((txn_id, rule_id))
    total = len(labels)
    fraud_count = sum(1 for value in labels.values() if value == "fraud")
    tallies: dict[str, list[int]] = {}
    for txn_id, rule_id in sorted(triggers):
        slot = tallies.setdefault(rule_id, [0, 0])
        slot[0 if labels[txn_id] == "fraud" else 1] += 1
    evidence = {
        rule_id: EvidenceCounts(counts[0], counts[1])
        for rule_id, counts in sorted(tallies.items())
    }
    return LabeledHistory(total=total, fraud_count=fraud_count, evidence=evidence)


def save_model(model: BayesModel, path: str | Path) -> None:
    """Write a fitted model as JSON; floats round-trip exactly."""
    document = {
        "format": MODEL_FORMAT,
        "smoothing": model.smoothing,
        "prior_fraud": model.prior_fraud,
        "prior_genuine": model.prior_genuine,
        "likelihoods": {
            eid: {
                "p_given_fraud": likelihood.p_given_fraud,
                "p_given_genuine": likelihood.p_given_genuine,
            }
            for eid, likelihood in sorted(model.likelihoods.items())
        },
    }
    Path(path).write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> BayesModel:
    path = Path(path)
    document = _read_json_object(path)
    if document.get("format") != MODEL_FORMAT:
        raise ParseError(
            f"{path}: not a model file (format {document.get('format')!r}, "
            f"expected {MODEL_FORMAT!r})"
        )
    likelihoods_doc = document.get("likelihoods")
    if not isinstance(likelihoods_doc, dict):
        raise ParseError(f"{path}: 'likelihoods' must be an object")
    likelihoods = {}
    for eid, entry in likelihoods_doc.items():
        if not isinstance(entry, dict):
            raise ParseError(f"{path}: likelihood {eid!r} must be an object")
        likelihoods[eid] = Likelihood(
            _number(entry, "p_given_fraud", f"{path}: likelihood {eid!r}"),
            _number(entry, "p_given_genuine", f"{path}: likelihood {eid!r}"),
        )
    try:
        return BayesModel(
            prior_fraud=_number(document, "prior_fraud", str(path)),
            prior_genuine=_number(document, "prior_genuine", str(path)),
            likelihoods=likelihoods,
            smoothing=_number(document, "smoothing", str(path)),
        )
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def load_rule_config(path: str | Path) -> RuleSet:
    """Parse a rule config into a RuleSet; a bayes combiner pulls in its model.

    A relative model reference is resolved against the config's directory.
    """
    path = Path(path)
    document = _read_json_object(path)
    frame = document.get("frame", list(FRAME_LABELS))
    if tuple(frame) != FRAME_LABELS:
        raise ParseError(f"{path}: frame must be {list(FRAME_LABELS)}, got {frame!r}")
    combiner_name = document.get("combiner", "ds-standard")
    threshold = document.get("threshold", 0.5)
    if not isinstance(threshold, (int, float)) or isinstance(threshold, bool):
        raise ParseError(f"{path}: threshold must be a number, got {threshold!r}")
    rules_doc = document.get("rules")
    if not isinstance(rules_doc, list) or not rules_doc:
        raise ParseError(f"{path}: 'rules' must be a non-empty list")
    rules = [_parse_rule(entry, index, path) for index, entry in enumerate(rules_doc)]
    if combiner_name in _COMBINER_MODES:
        combiner: BayesCombiner | DempsterCombiner = DempsterCombiner(
            _COMBINER_MODES[combiner_name]
        )
    elif combiner_name == "bayes":
        model_ref = document.get("model")
        if not isinstance(model_ref, str) or not model_ref:
            raise ParseError(f"{path}: combiner 'bayes' needs a 'model' file reference")
        model_path = Path(model_ref)
        if not model_path.is_absolute():
            model_path = path.parent / model_path
        combiner = BayesCombiner(load_model(model_path))
    else:
        raise ParseError(
            f"{path}: combiner must be one of ds-standard, ds-paper, bayes; "
            f"got {combiner_name!r}"
        )
    try:
        return RuleSet.from_rules(rules, combiner, float(threshold))
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def load_batch(path: str | Path) -> list[Transaction]:
    """Parse a line-delimited transaction batch.

    Each line is an object {id, triggered, payload?}; any unknown fields are
    folded into the payload. Transaction ids must be unique within the batch.
    """
    path = Path(path)
    transactions: list[Transaction] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                record = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{line_number}: invalid record: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise ParseError(f"{path}:{line_number}: record must be an object")
            txn_id = record.get("id")
            if not isinstance(txn_id, str) or not txn_id:
                raise ParseError(f"{path}:{line_number}: missing or invalid 'id'")
            if txn_id in seen:
                raise ParseError(f"{path}:{line_number}: duplicate transaction id {txn_id!r}")
            seen.add(txn_id)
            triggered = record.get("triggered", [])
            if not isinstance(triggered, list) or not all(
                isinstance(item, str) for item in triggered
            ):
                raise ParseError(
                    f"{path}:{line_number}: 'triggered' must be a list of rule ids"
                )
            explicit = record.get("payload")
            if explicit is not None and not isinstance(explicit, dict):
                raise ParseError(f"{path}:{line_number}: 'payload' must be an object")
            payload = dict(explicit or {})
            payload.update(
                (key, value)
                for key, value in record.items()
                if key not in ("id", "triggered", "payload")
            )
            transactions.append(Transaction(txn_id, tuple(triggered), payload or None))
    return transactions


def _parse_rule(entry: Any, index: int, path: Path) -> RuleSpec:
    where = f"{path}: rule #{index + 1}"
    if not isinstance(entry, dict):
        raise ParseError(f"{where}: must be an object")
    rule_id = entry.get("id")
    if not isinstance(rule_id, str) or not rule_id:
        raise ParseError(f"{where}: missing or invalid 'id'")
    where = f"{path}: rule {rule_id!r}"
    description = entry.get("description", "")
    if not isinstance(description, str):
        raise ParseError(f"{where}: 'description' must be a string")
    has_score = "score" in entry or "uncertainty" in entry
    has_masses = any(key in entry for key in ("m_fraud", "m_genuine", "m_uncertain"))
    if has_score and has_masses:
        raise ParseError(
            f"{where}: give either score/uncertainty or explicit masses, not both"
        )
    try:
        if has_score:
            score = _number(entry, "score", where)
            uncertainty = (
                _number(entry, "uncertainty", where) if "uncertainty" in entry else 0.0
            )
            return RuleSpec.from_score(rule_id, score, uncertainty, description)
        if has_masses:
            m_fraud = _number(entry, "m_fraud", where)
            m_genuine = _number(entry, "m_genuine", where)
            m_uncertain = (
                _number(entry, "m_uncertain", where) if "m_uncertain" in entry else 0.0
            )
            return RuleSpec(rule_id, m_fraud, m_genuine, m_uncertain, description)
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from exc
    raise ParseError(f"{where}: needs 'score' or explicit 'm_fraud'/'m_genuine' masses")


def _number(mapping: dict, key: str, where: str) -> float:
    value = mapping.get(key)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ParseError(f"{where}: field {key!r} must be a number, got {value!r}")
    return float(value)


def _read_json_object(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from exc
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(document, dict):
        raise ParseError(f"{path}: top level must be an object")
    return document
