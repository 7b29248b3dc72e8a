"""Disclosure-driven re-assessment: events, model versions, change reports
and CVE feed ingestion."""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, replace
from datetime import datetime, timezone

from .cvss import BASE_METRICS, TEMPORAL_METRICS, CvssError, MetricSet, base_score, parse_vector
from .impact import OBJECTIVES, ImpactVector, format_fraction
from .levels import ImpactLevel
from .matrix import RiskMatrix
from .model import Asset, DisclosureEvent, SecurityModel, Threat, require_valid
from .risk import effective_matrix, score_threat

THREAT_FIELDS = ("details", "category", "source", "attack_method", "physical")


class EventError(ValueError):
    pass


class CveFeedError(ValueError):
    def __init__(self, message: str, index: int | None = None):
        if index is not None:
            message = f"record {index}: {message}"
        super().__init__(message)
        self.index = index


class SkippedRecordWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ChangeRow:
    threat_id: int
    field: str
    before: str | None
    after: str | None

    def __str__(self) -> str:
        return f"{self.threat_id} {self.field}: {self.before or '-'} -> {self.after or '-'}"


@dataclass(frozen=True)
class ChangeReport:
    before_version: int
    after_version: int
    rows: tuple[ChangeRow, ...] = ()

    def for_threat(self, threat_id: int) -> dict[str, ChangeRow]:
        return {r.field: r for r in self.rows if r.threat_id == threat_id}


def check_event(event: DisclosureEvent, model: SecurityModel) -> None:
    if not event.targets:
        raise EventError(f"event {event.id!r} has no target threats")
    if not event.metric_overrides and not event.impact_overrides:
        raise EventError(f"event {event.id!r} has an empty override set")
    known = {t.id for t in model.threats}
    for target in event.targets:
        if target not in known:
            raise EventError(f"event {event.id!r} targets unknown threat {target}")
    for key, value in event.metric_overrides.items():
        if key not in BASE_METRICS and key not in TEMPORAL_METRICS:
            raise EventError(f"event {event.id!r}: unknown metric key {key}")
    for name, level in event.impact_overrides.items():
        if name not in OBJECTIVES:
            raise EventError(f"event {event.id!r}: unknown impact objective {name!r}")
        ImpactLevel.parse(level)


def apply_event(
    model: SecurityModel, event: DisclosureEvent, matrix: RiskMatrix | None = None
) -> tuple[SecurityModel, ChangeReport]:
    """Apply ``event`` and return the next model version and what changed."""
    require_valid(model)
    check_event(event, model)
    targets = set(event.targets)
    threats = []
    for threat in model.threats:
        if threat.id in targets:
            try:
                metrics = threat.metrics.with_overrides(event.metric_overrides)
            except CvssError as exc:
                raise EventError(f"event {event.id!r}: {exc}") from None
            threat = replace(
                threat, metrics=metrics, impact=threat.impact.with_overrides(event.impact_overrides)
            )
        threats.append(threat)
    updated = replace(
        model,
        threats=tuple(threats),
        events=model.events + (event,),
        model_version=model.model_version + 1,
    )
    return updated, diff(model, updated, matrix)


def _threat_values(threat: Threat, model: SecurityModel, matrix: RiskMatrix) -> dict[str, object]:
    values: dict[str, object] = {}
    for f in THREAT_FIELDS:
        values[f] = getattr(threat, f)
    for key, value in threat.metrics.as_dict().items():
        values[f"metric.{key}"] = value
    for key, value in threat.metrics.environmental:
        values[f"metric.{key}"] = value
    for name, level in zip(OBJECTIVES, threat.impact.levels()):
        values[f"impact_level.{name}"] = level
    row = score_threat(threat, model.weights, matrix)
    values["cvss_base"] = base_score(threat.metrics)
    values["cvss_temporal"] = row.cvss_temporal
    values["feasibility"] = row.feasibility
    values["impact_score"] = row.impact_score.value if row.impact_score else None
    values["impact"] = row.impact
    values["risk"] = row.risk
    return values


def _display(field: str, value) -> str | None:
    if value is None:
        return None
    if field == "impact_score":
        return format_fraction(value)
    if isinstance(value, bool):
        return "yes" if value else "no"
    return str(value)


def diff(a: SecurityModel, b: SecurityModel, matrix: RiskMatrix | None = None) -> ChangeReport:
    """Field-wise comparison of two model versions, threat by threat.

    Threats present in only one version produce a single ``threat`` row
    flagged ``added`` or ``removed``. Scores use each model's own weights.
    """
    matrix_a = effective_matrix(a, matrix)
    matrix_b = effective_matrix(b, matrix)
    threats_a = {t.id: t for t in a.threats}
    threats_b = {t.id: t for t in b.threats}
    rows = []
    for tid in sorted(set(threats_a) | set(threats_b)):
        if tid not in threats_a:
            rows.append(ChangeRow(tid, "threat", None, "added"))
            continue
        if tid not in threats_b:
            rows.append(ChangeRow(tid, "threat", "removed", None))
            continue
        before = _threat_values(threats_a[tid], a, matrix_a)
        after = _threat_values(threats_b[tid], b, matrix_b)
        keys = list(before) + [k for k in after if k not in before]
        for key in keys:
            old, new = before.get(key), after.get(key)
            if old != new:
                rows.append(ChangeRow(tid, key, _display(key, old), _display(key, new)))
    return ChangeReport(a.model_version, b.model_version, tuple(rows))


# --- CVE feed ingestion -----------------------------------------------------

_GENERIC_WORDS = {
    "system", "data", "store", "vehicle", "local", "embedded", "interface",
    "human", "machine", "central", "receiver", "module", "unit",
}


def _normalize(text: str) -> str:
    return " ".join(re.findall(r"[a-z0-9]+", text.lower()))


def asset_keywords(asset: Asset, model: SecurityModel) -> set[str]:
    """Component tags for an asset: its id, name, acronyms, distinctive name
    words and the channels of flows leaving it."""
    tags = {_normalize(asset.id), _normalize(asset.name)}
    tags.add(_normalize(re.sub(r"\([^)]*\)", " ", asset.name)))
    tags.update(_normalize(a) for a in re.findall(r"\(([^)]*)\)", asset.name))
    tags.update(
        w for w in _normalize(asset.name).split() if len(w) >= 4 and w not in _GENERIC_WORDS
    )
    for flow in model.flows:
        if flow.source == asset.id:
            tags.add(_normalize(flow.channel))
            tags.add(flow.channel.replace("-", ""))
    tags.discard("")
    return tags


def _mentions(text: str, keyword: str) -> bool:
    return f" {keyword} " in f" {text} "


def _records(feed) -> list:
    if isinstance(feed, dict):
        if "records" not in feed:
            raise CveFeedError("feed object has no 'records' list")
        feed = feed["records"]
    if not isinstance(feed, list):
        raise CveFeedError("feed must be a list of CVE records")
    return feed


def _record_fields(record, index: int):
    if not isinstance(record, dict):
        raise CveFeedError("record is not an object", index)
    cve_id = record.get("cve_id")
    if not isinstance(cve_id, str) or not cve_id:
        raise CveFeedError("missing cve_id", index)
    description = record.get("description", "")
    affected = record.get("affected", [])
    vector = record.get("cvss31_vector")
    if not isinstance(description, str):
        raise CveFeedError("description must be text", index)
    if not isinstance(affected, list) or not all(isinstance(p, str) for p in affected):
        raise CveFeedError("affected must be a list of product texts", index)
    if vector is not None and not isinstance(vector, str):
        raise CveFeedError("cvss31_vector must be a string", index)
    return cve_id, description, affected, vector


def _parse_timestamp(value) -> datetime | None:
    if not isinstance(value, str):
        return None
    try:
        stamp = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError:
        return None
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return stamp.astimezone(timezone.utc)


def ingest_cve(feed, model: SecurityModel) -> list[DisclosureEvent]:
    """Turn CVE records into candidate disclosure events for review.

    A record matches a threat when one of the threat's source-asset tags
    appears as whole words in the record's description or affected products.
    Matched threats whose metrics would change identically are grouped into
    one candidate. Candidates are ordered by number of matched tags (most
    first), then CVE id. Records without a usable CVSS v3.1 vector are skipped
    with a ``SkippedRecordWarning``.
    """
    records = _records(feed)
    assets = {a.id: a for a in model.assets}
    tags = {aid: asset_keywords(asset, model) for aid, asset in assets.items()}
    ranked = []
    for index, record in enumerate(records):
        cve_id, description, affected, vector = _record_fields(record, index)
        if vector is None:
            warnings.warn(f"{cve_id}: no CVSS v3.1 vector, skipped", SkippedRecordWarning, stacklevel=2)
            continue
        try:
            cve_metrics = parse_vector(vector)
        except CvssError as exc:
            warnings.warn(
                f"{cve_id}: not a CVSS v3.1 vector ({exc}), skipped", SkippedRecordWarning, stacklevel=2
            )
            continue
        text = _normalize(" ".join([description, *affected]))
        groups: dict[tuple, list[tuple[Threat, list[str]]]] = {}
        for threat in sorted(model.threats, key=lambda t: t.id):
            matched = sorted(k for k in tags.get(threat.source, ()) if _mentions(text, k))
            if not matched:
                continue
            overrides = _metric_delta(threat.metrics, cve_metrics)
            if overrides:
                groups.setdefault(tuple(overrides.items()), []).append((threat, matched))
        for overrides, members in groups.items():
            matched = sorted({k for _, ks in members for k in ks})
            ranked.append((len(matched), cve_id, [t.id for t, _ in members], dict(overrides), matched,
                           _parse_timestamp(record.get("published"))))

    ranked.sort(key=lambda r: (-r[0], r[1], r[2]))
    candidates = []
    counters: dict[str, int] = {}
    for _, cve_id, targets, overrides, matched, stamp in ranked:
        counters[cve_id] = counters.get(cve_id, 0) + 1
        why = f"{cve_id} (matched: {', '.join(matched)})"
        candidates.append(
            DisclosureEvent(
                id=f"candidate-{cve_id}-{counters[cve_id]}",
                reference=cve_id,
                targets=tuple(targets),
                metric_overrides=overrides,
                rationale={k: f"{why} sets {k}:{v}" for k, v in overrides.items()},
                timestamp=stamp,
            )
        )
    return candidates


def _metric_delta(current: MetricSet, proposed: MetricSet) -> dict[str, str]:
    return {
        key: proposed[key]
        for key in BASE_METRICS + TEMPORAL_METRICS
        if proposed[key] != current[key]
    }


def inverse_event(event: DisclosureEvent, model: SecurityModel, event_id: str) -> DisclosureEvent:
    """An event restoring the values ``event`` would overwrite in ``model``.

    Only meaningful for single-target events, or targets sharing the same
    prior values.
    """
    threat = model.threat_by_id(event.targets[0])
    impact: ImpactVector = threat.impact
    if any(getattr(impact, k) is None for k in event.impact_overrides):
        raise EventError(f"threat {threat.id} has unassessed impact levels that cannot be restored")
    return DisclosureEvent(
        id=event_id,
        reference=f"revert {event.reference}",
        targets=event.targets,
        metric_overrides={k: threat.metrics[k] for k in event.metric_overrides},
        impact_overrides={k: getattr(impact, k).value for k in event.impact_overrides},
        timestamp=event.timestamp,
    )
