"""CVSS v3.1 vector parsing, base/temporal scoring and severity mapping.

Scores are held as integer tenths so that equality and ordering never depend
on binary floating point. The round-up step uses the integer guard from the
FIRST CVSS v3.1 standard.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import total_ordering

from .levels import SeverityRating

VERSION_PREFIX = "CVSS:3.1"

BASE_METRICS = ("AV", "AC", "PR", "UI", "S", "C", "I", "A")
TEMPORAL_METRICS = ("E", "RL", "RC")
ENVIRONMENTAL_METRICS = ("CR", "IR", "AR", "MAV", "MAC", "MPR", "MUI", "MS", "MC", "MI", "MA")
METRIC_ORDER = BASE_METRICS + TEMPORAL_METRICS + ENVIRONMENTAL_METRICS

ALLOWED_VALUES = {
    "AV": ("N", "A", "L", "P"),
    "AC": ("L", "H"),
    "PR": ("N", "L", "H"),
    "UI": ("N", "R"),
    "S": ("U", "C"),
    "C": ("N", "L", "H"),
    "I": ("N", "L", "H"),
    "A": ("N", "L", "H"),
    "E": ("X", "U", "P", "F", "H"),
    "RL": ("X", "O", "T", "W", "U"),
    "RC": ("X", "U", "R", "C"),
    "CR": ("X", "L", "M", "H"),
    "IR": ("X", "L", "M", "H"),
    "AR": ("X", "L", "M", "H"),
    "MAV": ("X", "N", "A", "L", "P"),
    "MAC": ("X", "L", "H"),
    "MPR": ("X", "N", "L", "H"),
    "MUI": ("X", "N", "R"),
    "MS": ("X", "U", "C"),
    "MC": ("X", "N", "L", "H"),
    "MI": ("X", "N", "L", "H"),
    "MA": ("X", "N", "L", "H"),
}

ATTACK_VECTOR = {"N": 0.85, "A": 0.62, "L": 0.55, "P": 0.2}
ATTACK_COMPLEXITY = {"L": 0.77, "H": 0.44}
# columns: scope unchanged, scope changed
PRIVILEGES_REQUIRED = {"N": (0.85, 0.85), "L": (0.62, 0.68), "H": (0.27, 0.5)}
USER_INTERACTION = {"N": 0.85, "R": 0.62}
CIA_IMPACT = {"H": 0.56, "L": 0.22, "N": 0.0}
EXPLOIT_MATURITY = {"X": 1.0, "H": 1.0, "F": 0.97, "P": 0.94, "U": 0.91}
REMEDIATION_LEVEL = {"X": 1.0, "U": 1.0, "W": 0.97, "T": 0.96, "O": 0.95}
REPORT_CONFIDENCE = {"X": 1.0, "C": 1.0, "R": 0.96, "U": 0.92}


class CvssError(ValueError):
    """Malformed vector or unsupported scoring request.

    ``position`` is the zero-based character offset in the vector text where
    the problem was found, when there is one.
    """

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


@dataclass(frozen=True)
class MetricSet:
    """Base and temporal metric values of one vulnerability or threat."""

    av: str
    ac: str
    pr: str
    ui: str
    s: str
    c: str
    i: str
    a: str
    e: str = "X"
    rl: str = "X"
    rc: str = "X"
    # sorted (key, value) pairs; X values are dropped
    environmental: tuple[tuple[str, str], ...] = field(default=())

    def __post_init__(self):
        for key in BASE_METRICS + TEMPORAL_METRICS:
            value = getattr(self, key.lower())
            if value not in ALLOWED_VALUES[key]:
                raise CvssError(f"unknown value {value} for {key}")
        env = []
        for key, value in self.environmental:
            if key not in ENVIRONMENTAL_METRICS:
                raise CvssError(f"unknown metric {key}")
            if value not in ALLOWED_VALUES[key]:
                raise CvssError(f"unknown value {value} for {key}")
            if value != "X":
                env.append((key, value))
        env.sort(key=lambda kv: ENVIRONMENTAL_METRICS.index(kv[0]))
        object.__setattr__(self, "environmental", tuple(env))

    def __getitem__(self, key: str) -> str:
        """Metric value by its vector abbreviation, e.g. ``m["AV"]``."""
        if key in BASE_METRICS or key in TEMPORAL_METRICS:
            return getattr(self, key.lower())
        if key in ENVIRONMENTAL_METRICS:
            return dict(self.environmental).get(key, "X")
        raise KeyError(key)

    def as_dict(self) -> dict[str, str]:
        """Base and temporal metrics keyed by abbreviation, in canonical order."""
        return {key: self[key] for key in BASE_METRICS + TEMPORAL_METRICS}

    def with_overrides(self, overrides: dict[str, str]) -> MetricSet:
        changes = {}
        for key, value in overrides.items():
            if key not in BASE_METRICS and key not in TEMPORAL_METRICS:
                raise CvssError(f"unknown metric key {key}")
            changes[key.lower()] = value
        return replace(self, **changes)

    def __str__(self) -> str:
        return format_vector(self)


@total_ordering
@dataclass(frozen=True)
class Score:
    """A CVSS score with one fractional digit, stored as integer tenths."""

    tenths: int

    def __post_init__(self):
        if not 0 <= self.tenths <= 100:
            raise ValueError(f"score out of range: {self.tenths / 10}")

    @classmethod
    def parse(cls, text: str | float) -> Score:
        whole, _, frac = f"{text}".partition(".")
        if len(frac) > 1:
            raise ValueError(f"score must have one fractional digit: {text!r}")
        return cls(int(whole) * 10 + int(frac or 0))

    @property
    def value(self) -> float:
        return self.tenths / 10

    def __float__(self) -> float:
        return self.value

    def __lt__(self, other):
        if not isinstance(other, Score):
            return NotImplemented
        return self.tenths < other.tenths

    def __str__(self) -> str:
        return f"{self.tenths // 10}.{self.tenths % 10}"


def parse_vector(text: str) -> MetricSet:
    """Parse a CVSS v3.1 vector string, with or without the ``CVSS:3.1/`` prefix.

    Metrics may appear in any order. Temporal metrics that are absent are Not
    Defined (``X``). Environmental metrics are accepted and kept but cannot be
    scored.
    """
    if not isinstance(text, str):
        raise CvssError(f"vector must be a string, got {type(text).__name__}")
    seen: dict[str, str] = {}
    offset = 0
    for index, token in enumerate(text.split("/")):
        pos = offset
        offset += len(token) + 1
        key, sep, value = token.partition(":")
        if index == 0 and key == "CVSS":
            if token != VERSION_PREFIX:
                raise CvssError(f"unsupported CVSS version {value!r}", pos)
            continue
        if not sep or not key or not value:
            raise CvssError(f"malformed token {token!r}", pos)
        if key not in ALLOWED_VALUES:
            raise CvssError(f"unknown metric key {key}", pos)
        if key in seen:
            raise CvssError(f"duplicate metric {key}", pos)
        if value not in ALLOWED_VALUES[key]:
            raise CvssError(f"unknown value {value} for {key}", pos + len(key) + 1)
        seen[key] = value
    missing = [key for key in BASE_METRICS if key not in seen]
    if missing:
        raise CvssError(f"missing base metric {', '.join(missing)}", len(text))
    kwargs = {key.lower(): seen.get(key, "X") for key in BASE_METRICS + TEMPORAL_METRICS}
    env = tuple((key, seen[key]) for key in ENVIRONMENTAL_METRICS if key in seen)
    return MetricSet(**kwargs, environmental=env)


def format_vector(m: MetricSet) -> str:
    """Canonical vector text: prefix, fixed metric order, ``X`` values omitted."""
    parts = [VERSION_PREFIX]
    for key in METRIC_ORDER:
        value = m[key]
        if key in BASE_METRICS or value != "X":
            parts.append(f"{key}:{value}")
    return "/".join(parts)


def roundup(x: float) -> Score:
    """Smallest one-decimal value >= x, with the v3.1 integer guard."""
    scaled = round(x * 100000)
    if scaled % 10000 == 0:
        return Score(scaled // 10000)
    return Score(math.floor(scaled / 10000) + 1)


def _require_scorable(m: MetricSet) -> None:
    if m.environmental:
        keys = ", ".join(k for k, _ in m.environmental)
        raise CvssError(f"environmental metrics are not supported for scoring ({keys})")


def impact_subscore(m: MetricSet) -> float:
    iss = 1 - (1 - CIA_IMPACT[m.c]) * (1 - CIA_IMPACT[m.i]) * (1 - CIA_IMPACT[m.a])
    if m.s == "U":
        return 6.42 * iss
    return 7.52 * (iss - 0.029) - 3.25 * (iss - 0.02) ** 15


def exploitability_subscore(m: MetricSet) -> float:
    pr = PRIVILEGES_REQUIRED[m.pr][0 if m.s == "U" else 1]
    return 8.22 * ATTACK_VECTOR[m.av] * ATTACK_COMPLEXITY[m.ac] * pr * USER_INTERACTION[m.ui]


def base_score(m: MetricSet) -> Score:
    _require_scorable(m)
    impact = impact_subscore(m)
    if impact <= 0:
        return Score(0)
    total = impact + exploitability_subscore(m)
    if m.s == "C":
        total *= 1.08
    return roundup(min(total, 10))


def temporal_score(m: MetricSet) -> Score:
    base = base_score(m)
    return roundup(
        base.value * EXPLOIT_MATURITY[m.e] * REMEDIATION_LEVEL[m.rl] * REPORT_CONFIDENCE[m.rc]
    )


def severity(score: Score) -> SeverityRating:
    if score.tenths == 0:
        return SeverityRating.NONE
    if score.tenths <= 39:
        return SeverityRating.LOW
    if score.tenths <= 69:
        return SeverityRating.MEDIUM
    if score.tenths <= 89:
        return SeverityRating.HIGH
    return SeverityRating.CRITICAL
