"""Model and event files: canonical JSON with strict schema checks."""

from __future__ import annotations

import json
from datetime import datetime, timezone
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .attack_tree import AttackTree, Gate, Leaf
from .cvss import CvssError, format_vector, parse_vector
from .impact import OBJECTIVES, ImpactVector, ImpactWeights
from .levels import ImpactLevel, ImpactRating, RiskRating, SeverityRating
from .matrix import MatrixError, RiskMatrix
from .model import (
    SCHEMA_VERSION,
    Asset,
    AttackerPersona,
    DataFlow,
    DisclosureEvent,
    RecordedRatings,
    SecurityModel,
    StrideCategory,
    Threat,
    TrustBoundary,
    require_valid,
)

MODEL_FIELDS = (
    "schema_version", "model_version", "weights", "matrix_override", "assets", "flows",
    "boundaries", "threats", "personas", "trees", "events",
)


class ModelFileError(ValueError):
    """Unreadable, malformed or schema-violating model/event file."""


# --- helpers ---------------------------------------------------------------

def _expect_keys(data, where: str, required: tuple, optional: tuple = ()) -> dict:
    if not isinstance(data, dict):
        raise ModelFileError(f"{where}: expected an object")
    unknown = [k for k in data if k not in required and k not in optional]
    if unknown:
        raise ModelFileError(f"{where}: unknown field {unknown[0]!r}")
    missing = [k for k in required if k not in data]
    if missing:
        raise ModelFileError(f"{where}: missing field {missing[0]!r}")
    return data


def _list(data, key: str) -> list:
    value = data.get(key, [])
    if not isinstance(value, list):
        raise ModelFileError(f"{key}: expected a list")
    return value


def _fraction_to_json(x: Fraction):
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _fraction_from_json(value, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ModelFileError(f"{where}: weight must be an integer or a 'p/q' string")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ModelFileError(f"{where}: invalid weight {value!r}") from None


def _timestamp_to_json(stamp: datetime | None):
    if stamp is None:
        return None
    return stamp.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def _timestamp_from_json(value, where: str) -> datetime | None:
    if value is None:
        return None
    try:
        stamp = datetime.fromisoformat(str(value).replace("Z", "+00:00"))
    except ValueError:
        raise ModelFileError(f"{where}: invalid timestamp {value!r}") from None
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return stamp.astimezone(timezone.utc)


# --- to JSON ---------------------------------------------------------------

def _node_to_json(node) -> dict:
    if isinstance(node, Gate):
        return {"label": node.label, "gate": node.gate, "children": list(node.children)}
    out = {"label": node.label}
    if node.threat is not None:
        out["threat"] = node.threat
    return out


def _threat_to_json(t: Threat) -> dict:
    out = {
        "id": t.id,
        "source": t.source,
        "category": t.category.value,
        "details": t.details,
        "attack_method": t.attack_method,
        "physical": t.physical,
        "cvss": format_vector(t.metrics),
        "impact": {
            name: (level.value if level is not None else None)
            for name, level in zip(OBJECTIVES, t.impact.levels())
        },
    }
    if t.recorded is not None:
        out["recorded"] = {
            k: getattr(t.recorded, k).value
            for k in ("feasibility", "impact", "risk")
            if getattr(t.recorded, k) is not None
        }
    return out


def event_to_json(e: DisclosureEvent) -> dict:
    return {
        "id": e.id,
        "reference": e.reference,
        "timestamp": _timestamp_to_json(e.timestamp),
        "targets": list(e.targets),
        "metric_overrides": dict(e.metric_overrides),
        "impact_overrides": {k: str(v) for k, v in e.impact_overrides.items()},
        "rationale": dict(e.rationale),
    }


def model_to_json(m: SecurityModel) -> dict:
    w = m.weights
    return {
        "schema_version": m.schema_version,
        "model_version": m.model_version,
        "weights": {name: _fraction_to_json(getattr(w, name)) for name in OBJECTIVES},
        "matrix_override": m.matrix.to_dict() if m.matrix is not None else None,
        "assets": [
            {"id": a.id, "name": a.name, "kind": a.kind, "description": a.description}
            for a in m.assets
        ],
        "flows": [
            {
                "id": f.id, "source": f.source, "target": f.target, "channel": f.channel,
                "crosses_trust_boundary": f.crosses_trust_boundary,
            }
            for f in m.flows
        ],
        "boundaries": [
            {"id": b.id, "name": b.name, "members": sorted(b.members)} for b in m.boundaries
        ],
        "threats": [_threat_to_json(t) for t in m.threats],
        "personas": [
            {"id": p.id, "name": p.name, "goal": p.goal, "tree": p.tree} for p in m.personas
        ],
        "trees": [
            {
                "id": t.id,
                "root": t.root,
                "nodes": {k: _node_to_json(n) for k, n in sorted(t.nodes.items())},
            }
            for t in m.trees
        ],
        "events": [event_to_json(e) for e in m.events],
    }


def dumps(data) -> str:
    """Canonical JSON text: fixed indentation, UTF-8 characters, trailing newline."""
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


# --- from JSON -------------------------------------------------------------

def _node_from_json(data, where: str):
    if isinstance(data, dict) and "gate" in data:
        _expect_keys(data, where, ("label", "gate", "children"))
        if not isinstance(data["children"], list):
            raise ModelFileError(f"{where}.children: expected a list")
        try:
            return Gate(data["label"], data["gate"], tuple(data["children"]))
        except ValueError as exc:
            raise ModelFileError(f"{where}: {exc}") from None
    _expect_keys(data, where, ("label",), ("threat",))
    threat = data.get("threat")
    if threat is not None and (isinstance(threat, bool) or not isinstance(threat, int)):
        raise ModelFileError(f"{where}.threat: expected an integer threat id")
    return Leaf(data["label"], threat)


def _impact_from_json(data, where: str) -> ImpactVector:
    if data is None:
        return ImpactVector()
    _expect_keys(data, where, (), OBJECTIVES)
    try:
        return ImpactVector(**{
            k: (ImpactLevel.parse(v) if v is not None else None) for k, v in data.items()
        })
    except ValueError as exc:
        raise ModelFileError(f"{where}: {exc}") from None


def _threat_from_json(data, where: str) -> Threat:
    _expect_keys(
        data, where, ("id", "source", "category", "details", "cvss"),
        ("attack_method", "physical", "impact", "recorded"),
    )
    if isinstance(data["id"], bool) or not isinstance(data["id"], int):
        raise ModelFileError(f"{where}.id: threat ids are integers")
    try:
        metrics = parse_vector(data["cvss"])
        category = StrideCategory.parse(data["category"])
    except (CvssError, ValueError) as exc:
        raise ModelFileError(f"{where}: {exc}") from None
    recorded = None
    if data.get("recorded") is not None:
        rec = _expect_keys(data["recorded"], f"{where}.recorded", (), ("feasibility", "impact", "risk"))
        try:
            recorded = RecordedRatings(
                feasibility=SeverityRating.parse(rec["feasibility"]) if "feasibility" in rec else None,
                impact=ImpactRating.parse(rec["impact"]) if "impact" in rec else None,
                risk=RiskRating.parse(rec["risk"]) if "risk" in rec else None,
            )
        except ValueError as exc:
            raise ModelFileError(f"{where}.recorded: {exc}") from None
    return Threat(
        id=data["id"],
        details=data["details"],
        category=category,
        source=data["source"],
        metrics=metrics,
        impact=_impact_from_json(data.get("impact"), f"{where}.impact"),
        attack_method=data.get("attack_method", ""),
        physical=bool(data.get("physical", False)),
        recorded=recorded,
    )


def event_from_json(data, where: str = "event") -> DisclosureEvent:
    _expect_keys(
        data, where, ("id", "reference", "targets"),
        ("timestamp", "metric_overrides", "impact_overrides", "rationale"),
    )
    targets = data["targets"]
    if not isinstance(targets, list) or any(isinstance(t, bool) or not isinstance(t, int) for t in targets):
        raise ModelFileError(f"{where}.targets: expected a list of integer threat ids")
    overrides = data.get("metric_overrides", {}) or {}
    impacts = data.get("impact_overrides", {}) or {}
    rationale = data.get("rationale", {}) or {}
    for name, value in (("metric_overrides", overrides), ("impact_overrides", impacts), ("rationale", rationale)):
        if not isinstance(value, dict) or not all(isinstance(v, str) for v in value.values()):
            raise ModelFileError(f"{where}.{name}: expected an object of strings")
    return DisclosureEvent(
        id=data["id"],
        reference=data["reference"],
        timestamp=_timestamp_from_json(data.get("timestamp"), f"{where}.timestamp"),
        targets=tuple(targets),
        metric_overrides=dict(overrides),
        impact_overrides=dict(impacts),
        rationale=dict(rationale),
    )


def model_from_json(data) -> SecurityModel:
    _expect_keys(data, "model", ("schema_version",), MODEL_FIELDS)
    if data["schema_version"] != SCHEMA_VERSION:
        raise ModelFileError(
            f"schema_version {data['schema_version']!r} is not supported (expected {SCHEMA_VERSION})"
        )
    weights_data = data.get("weights") or {}
    _expect_keys(weights_data, "weights", (), OBJECTIVES)
    try:
        weights = ImpactWeights(**{
            k: _fraction_from_json(v, f"weights.{k}") for k, v in weights_data.items()
        })
    except ValueError as exc:
        raise ModelFileError(f"weights: {exc}") from None
    matrix = None
    if data.get("matrix_override") is not None:
        try:
            matrix = RiskMatrix.from_dict(data["matrix_override"])
        except MatrixError as exc:
            raise ModelFileError(f"matrix_override: {exc}") from None

    assets = []
    for i, a in enumerate(_list(data, "assets")):
        _expect_keys(a, f"assets[{i}]", ("id", "name", "kind"), ("description",))
        assets.append(Asset(a["id"], a["name"], a["kind"], a.get("description", "")))
    flows = []
    for i, f in enumerate(_list(data, "flows")):
        _expect_keys(f, f"flows[{i}]", ("id", "source", "target", "channel"), ("crosses_trust_boundary",))
        flows.append(DataFlow(f["id"], f["source"], f["target"], f["channel"],
                              bool(f.get("crosses_trust_boundary", False))))
    boundaries = []
    for i, b in enumerate(_list(data, "boundaries")):
        _expect_keys(b, f"boundaries[{i}]", ("id", "name"), ("members",))
        boundaries.append(TrustBoundary(b["id"], b["name"], frozenset(b.get("members", []))))
    threats = [_threat_from_json(t, f"threats[{i}]") for i, t in enumerate(_list(data, "threats"))]
    personas = []
    for i, p in enumerate(_list(data, "personas")):
        _expect_keys(p, f"personas[{i}]", ("id", "name", "tree"), ("goal",))
        personas.append(AttackerPersona(p["id"], p["name"], p.get("goal", ""), p["tree"]))
    trees = []
    for i, t in enumerate(_list(data, "trees")):
        _expect_keys(t, f"trees[{i}]", ("id", "root", "nodes"))
        if not isinstance(t["nodes"], dict):
            raise ModelFileError(f"trees[{i}].nodes: expected an object")
        nodes = {k: _node_from_json(n, f"trees[{i}].nodes.{k}") for k, n in t["nodes"].items()}
        trees.append(AttackTree(t["id"], t["root"], nodes))
    events = [event_from_json(e, f"events[{i}]") for i, e in enumerate(_list(data, "events"))]
    model_version = data.get("model_version", 1)
    if isinstance(model_version, bool) or not isinstance(model_version, int):
        raise ModelFileError("model_version: expected an integer")
    return SecurityModel(
        assets=tuple(assets), flows=tuple(flows), boundaries=tuple(boundaries),
        threats=tuple(threats), personas=tuple(personas), trees=tuple(trees),
        events=tuple(events), weights=weights, matrix=matrix,
        model_version=model_version, schema_version=data["schema_version"],
    )


def _read_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelFileError(f"{path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise ModelFileError(f"{path}: not UTF-8 text") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def load_model(path, validate: bool = True) -> SecurityModel:
    """Read a model file. With ``validate`` (the default) integrity errors
    raise ``ModelValidationError``."""
    data = _read_json(path)
    try:
        model = model_from_json(data)
    except ModelFileError as exc:
        raise ModelFileError(f"{path}: {exc}") from None
    if validate:
        require_valid(model)
    return model


def save_model(model: SecurityModel, path) -> None:
    Path(path).write_text(dumps(model_to_json(model)), encoding="utf-8")


def load_event(path) -> DisclosureEvent:
    data = _read_json(path)
    try:
        return event_from_json(data)
    except ModelFileError as exc:
        raise ModelFileError(f"{path}: {exc}") from None


def load_feed(path):
    return _read_json(path)


def bundled(name: str) -> Path:
    """Path to a fixture shipped with the package (e.g. ``ivi-v1.json``)."""
    return Path(str(resources.files("tarakit") / "data" / name))
