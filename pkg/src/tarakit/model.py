"""Domain model of the system under assessment and its integrity checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum

from .attack_tree import AttackTree, Leaf
from .cvss import MetricSet
from .impact import DEFAULT_WEIGHTS, ImpactVector, ImpactWeights
from .levels import ImpactRating, RiskRating, SeverityRating
from .matrix import RiskMatrix

SCHEMA_VERSION = 1

ASSET_KINDS = ("module", "datastore", "external-entity")
CHANNELS = ("internal-bus", "usb", "bluetooth", "wifi", "gps-rf", "cellular", "physical")


class StrideCategory(str, Enum):
    SPOOFING = "Spoofing"
    TAMPERING = "Tampering"
    REPUDIATION = "Repudiation"
    INFORMATION_DISCLOSURE = "Information Disclosure"
    DENIAL_OF_SERVICE = "Denial of Service"
    ELEVATION_OF_PRIVILEGE = "Elevation of Privilege"

    @classmethod
    def parse(cls, text: str) -> StrideCategory:
        key = str(text).replace(" ", "").replace("-", "").lower()
        for member in cls:
            if member.value.replace(" ", "").lower() == key:
                return member
        raise ValueError(f"unknown STRIDE category {text!r}")

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Asset:
    id: str
    name: str
    kind: str
    description: str = ""


@dataclass(frozen=True)
class DataFlow:
    id: str
    source: str
    target: str
    channel: str
    crosses_trust_boundary: bool = False


@dataclass(frozen=True)
class TrustBoundary:
    id: str
    name: str
    members: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))


@dataclass(frozen=True)
class RecordedRatings:
    """Ratings an analyst tabulated by hand, kept to flag disagreement with
    recomputed values."""

    feasibility: SeverityRating | None = None
    impact: ImpactRating | None = None
    risk: RiskRating | None = None


@dataclass(frozen=True)
class Threat:
    id: int
    details: str
    category: StrideCategory
    source: str
    metrics: MetricSet
    impact: ImpactVector = field(default_factory=ImpactVector)
    attack_method: str = ""
    physical: bool = False
    recorded: RecordedRatings | None = None


@dataclass(frozen=True)
class AttackerPersona:
    id: str
    name: str
    goal: str
    tree: str


@dataclass(frozen=True)
class DisclosureEvent:
    """A vulnerability disclosure expressed as partial overrides on threats."""

    id: str
    reference: str
    targets: tuple[int, ...]
    metric_overrides: dict[str, str] = field(default_factory=dict)
    impact_overrides: dict[str, str] = field(default_factory=dict)
    rationale: dict[str, str] = field(default_factory=dict)
    timestamp: datetime | None = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))


@dataclass(frozen=True)
class SecurityModel:
    assets: tuple[Asset, ...] = ()
    flows: tuple[DataFlow, ...] = ()
    boundaries: tuple[TrustBoundary, ...] = ()
    threats: tuple[Threat, ...] = ()
    personas: tuple[AttackerPersona, ...] = ()
    trees: tuple[AttackTree, ...] = ()
    events: tuple[DisclosureEvent, ...] = ()
    weights: ImpactWeights = DEFAULT_WEIGHTS
    matrix: RiskMatrix | None = None
    model_version: int = 1
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        for name in ("assets", "flows", "boundaries", "threats", "personas", "trees", "events"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    def threat_by_id(self, threat_id: int) -> Threat:
        for threat in self.threats:
            if threat.id == threat_id:
                return threat
        raise ThreatNotFound(threat_id)

    def asset_by_id(self, asset_id: str) -> Asset:
        for asset in self.assets:
            if asset.id == asset_id:
                return asset
        raise KeyError(asset_id)

    def tree_by_id(self, tree_id: str) -> AttackTree:
        for tree in self.trees:
            if tree.id == tree_id:
                return tree
        raise KeyError(tree_id)

    def persona_by_id(self, persona_id: str) -> AttackerPersona:
        for persona in self.personas:
            if persona.id == persona_id:
                return persona
        raise KeyError(persona_id)


class ThreatNotFound(KeyError):
    def __init__(self, threat_id):
        super().__init__(threat_id)
        self.threat_id = threat_id

    def __str__(self) -> str:
        return f"no threat with id {self.threat_id}"


def threat_by_id(model: SecurityModel, threat_id: int) -> Threat:
    return model.threat_by_id(threat_id)


@dataclass(frozen=True)
class Issue:
    severity: str  # "error" | "warning"
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.path}: {self.message}"


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)

    @property
    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "error"]

    @property
    def warnings(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def error(self, path: str, message: str) -> None:
        self.issues.append(Issue("error", path, message))

    def warn(self, path: str, message: str) -> None:
        self.issues.append(Issue("warning", path, message))


class ModelValidationError(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        lines = [str(i) for i in report.errors]
        super().__init__(f"{len(lines)} validation error(s):\n" + "\n".join(lines))


def _check_unique(report: ValidationReport, section: str, items) -> set:
    seen = set()
    for index, item in enumerate(items):
        if item.id in seen:
            report.error(f"{section}[{index}].id", f"duplicate id {item.id!r}")
        seen.add(item.id)
    return seen


def validate(model: SecurityModel) -> ValidationReport:
    """Report (never raise) every integrity problem in ``model``."""
    report = ValidationReport()
    asset_ids = _check_unique(report, "assets", model.assets)
    _check_unique(report, "flows", model.flows)
    _check_unique(report, "boundaries", model.boundaries)
    threat_ids = _check_unique(report, "threats", model.threats)
    _check_unique(report, "personas", model.personas)
    tree_ids = _check_unique(report, "trees", model.trees)

    for index, asset in enumerate(model.assets):
        if asset.kind not in ASSET_KINDS:
            report.error(f"assets[{index}].kind", f"unknown asset kind {asset.kind!r}")

    for index, flow in enumerate(model.flows):
        path = f"flows[{index}]"
        for end in ("source", "target"):
            ref = getattr(flow, end)
            if ref not in asset_ids:
                report.error(f"{path}.{end}", f"unresolved asset reference {ref!r}")
        if flow.source == flow.target:
            report.error(path, "flow source and target are the same asset")
        if flow.channel not in CHANNELS:
            report.error(f"{path}.channel", f"unknown channel {flow.channel!r}")

    for index, boundary in enumerate(model.boundaries):
        for member in sorted(boundary.members):
            if member not in asset_ids:
                report.error(f"boundaries[{index}].members", f"unresolved asset reference {member!r}")

    for index, threat in enumerate(model.threats):
        path = f"threats[{index}]"
        if not isinstance(threat.id, int) or isinstance(threat.id, bool) or threat.id <= 0:
            report.error(f"{path}.id", f"threat id must be a positive integer, got {threat.id!r}")
        if threat.source not in asset_ids:
            report.error(f"{path}.source", f"unresolved asset reference {threat.source!r}")
        if not threat.impact.complete:
            report.warn(f"{path}.impact", f"threat {threat.id} has unassessed impact objectives")

    for index, persona in enumerate(model.personas):
        if persona.tree not in tree_ids:
            report.error(f"personas[{index}].tree", f"unresolved attack tree reference {persona.tree!r}")

    referenced: set[int] = set()
    for index, tree in enumerate(model.trees):
        path = f"trees[{index}]"
        for problem in tree.structure_errors():
            report.error(path, problem)
        for node_id, node in sorted(tree.nodes.items()):
            if not isinstance(node, Leaf):
                continue
            if node.threat is None:
                report.warn(f"{path}.nodes.{node_id}", "leaf has no threat reference and cannot be scored")
            elif node.threat not in threat_ids:
                report.error(f"{path}.nodes.{node_id}", f"unresolved threat reference {node.threat!r}")
            else:
                referenced.add(node.threat)

    for index, threat in enumerate(model.threats):
        if threat.id not in referenced:
            report.warn(f"threats[{index}]", f"threat {threat.id} is not referenced by any attack-tree leaf")

    if model.model_version != 1 + len(model.events):
        report.error(
            "model_version",
            f"model_version {model.model_version} does not match {len(model.events)} applied event(s)",
        )
    event_ids = set()
    for index, event in enumerate(model.events):
        if event.id in event_ids:
            report.error(f"events[{index}].id", f"duplicate id {event.id!r}")
        event_ids.add(event.id)
        for target in event.targets:
            if target not in threat_ids:
                report.error(f"events[{index}].targets", f"unresolved threat reference {target!r}")
    return report


def require_valid(model: SecurityModel) -> ValidationReport:
    report = validate(model)
    if not report.ok:
        raise ModelValidationError(report)
    return report
