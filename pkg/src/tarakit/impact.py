"""HEAVENS 2.0 impact estimation: weighted, normalised impact score and rating.

All arithmetic is exact (``fractions.Fraction``). Decimal renderings round
half-up to four places.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction

from .levels import ImpactLevel, ImpactRating

OBJECTIVES = ("safety", "operational", "financial", "privacy")

LEVEL_DESCRIPTIONS = {
    "safety": {
        ImpactLevel.NONE: "No injury",
        ImpactLevel.LOW: "Light and moderate injuries",
        ImpactLevel.MEDIUM: "Severe and life-threatening injuries (survival probable)",
        ImpactLevel.HIGH: "Life-threatening injuries (survival uncertain), fatal injuries",
    },
    "operational": {
        ImpactLevel.NONE: "No discernible effect",
        ImpactLevel.LOW: (
            "Appearance item or audible noise (vehicle still operates, but does not "
            "conform, annoys more than 75% of customers)"
        ),
        ImpactLevel.MEDIUM: (
            "Degradation of primary function (vehicle still operates, but at a reduced "
            "level of performance)"
        ),
        ImpactLevel.HIGH: (
            "Potential failure mode affects safe vehicle operation without warning or "
            "involves non-compliance with government regulations"
        ),
    },
    "financial": {
        ImpactLevel.NONE: "No discernible effect. No appreciable consequences",
        ImpactLevel.LOW: "The financial damage remains tolerable to the organisation",
        ImpactLevel.MEDIUM: (
            "The resulting damage leads to substantial financial losses, but does not "
            "threaten the existence of the organisation"
        ),
        ImpactLevel.HIGH: "The financial damage threatens the existence of the organisation",
    },
    "privacy": {
        ImpactLevel.NONE: "No discernible effects in relation to violations of privacy",
        ImpactLevel.LOW: (
            "Privacy violations of a particular stakeholder (e.g., vehicle owner, driver) "
            "which may not lead to abuses (e.g., impersonation of a victim to perform "
            "actions with stolen identities). Violation of legislations without appreciable "
            "consequences for business operations and finance (e.g., warning without any "
            "significant financial penalty, limited media coverage) for any stakeholder "
            "(e.g., OEM, fleet owner, driver)"
        ),
        ImpactLevel.MEDIUM: (
            "Privacy violations of a particular stakeholder (e.g., vehicle owner, driver) "
            "leading to abuses (e.g., impersonation of a victim to perform actions with "
            "stolen identities) and media coverage. Violation of legislations with potential "
            "consequences for business operations and finance (e.g., financial penalties, "
            "loss of market share, media coverage)"
        ),
        ImpactLevel.HIGH: (
            "Privacy violation of multiple stakeholders (e.g., fleet owners, multiple vehicle "
            "owners and multiple drivers) leading to abuses (e.g., impersonation of a victim "
            "to perform actions with stolen identities). Such a level of privacy violation may "
            "lead to extensive media coverage as well as severe consequences in terms of loss "
            "of market share, business operations, trust, reputation, and finance for OEMs and "
            "fleet owners. Violation of legislations (e.g., environmental, driver) causing "
            "significant consequences for business operations and finance (e.g., huge "
            "financial penalties, loss of market share) as well as extensive media coverage"
        ),
    },
}


@dataclass(frozen=True)
class ImpactVector:
    """Impact level per security objective.

    A freshly imported threat may leave objectives unassessed (``None``); such
    a vector cannot be scored until every objective has a level.
    """

    safety: ImpactLevel | None = None
    operational: ImpactLevel | None = None
    financial: ImpactLevel | None = None
    privacy: ImpactLevel | None = None

    def __post_init__(self):
        for name in OBJECTIVES:
            value = getattr(self, name)
            if value is not None and not isinstance(value, ImpactLevel):
                object.__setattr__(self, name, ImpactLevel.parse(value))

    @property
    def complete(self) -> bool:
        return all(getattr(self, name) is not None for name in OBJECTIVES)

    def levels(self) -> tuple[ImpactLevel | None, ...]:
        return tuple(getattr(self, name) for name in OBJECTIVES)

    def with_overrides(self, overrides: dict[str, ImpactLevel | str]) -> ImpactVector:
        values = dict(zip(OBJECTIVES, self.levels()))
        for name, level in overrides.items():
            if name not in OBJECTIVES:
                raise ValueError(f"unknown impact objective {name!r}")
            values[name] = level if isinstance(level, ImpactLevel) else ImpactLevel.parse(level)
        return ImpactVector(**values)


@dataclass(frozen=True)
class ImpactWeights:
    safety: Fraction = Fraction(10)
    operational: Fraction = Fraction(1)
    financial: Fraction = Fraction(1)
    privacy: Fraction = Fraction(1)

    def __post_init__(self):
        for name in OBJECTIVES:
            value = Fraction(getattr(self, name))
            if value <= 0:
                raise ValueError(f"impact weight for {name} must be positive, got {value}")
            object.__setattr__(self, name, value)

    @property
    def total(self) -> Fraction:
        return sum((getattr(self, name) for name in OBJECTIVES), Fraction(0))


DEFAULT_WEIGHTS = ImpactWeights()


@dataclass(frozen=True)
class ImpactScore:
    """Weighted sum (``raw``) and its normalisation to [0, 1] (``value``)."""

    raw: Fraction
    value: Fraction

    def __str__(self) -> str:
        return format_fraction(self.value)


def format_fraction(x: Fraction, places: int = 4) -> str:
    quantum = Decimal(1).scaleb(-places)
    exact = Decimal(x.numerator) / Decimal(x.denominator)
    return str(exact.quantize(quantum, rounding=ROUND_HALF_UP))


def impact_score(v: ImpactVector, w: ImpactWeights = DEFAULT_WEIGHTS) -> ImpactScore:
    if not v.complete:
        missing = [name for name in OBJECTIVES if getattr(v, name) is None]
        raise ValueError(f"impact not assessed for: {', '.join(missing)}")
    raw = sum(
        (getattr(w, name) * getattr(v, name).numeric for name in OBJECTIVES), Fraction(0)
    )
    return ImpactScore(raw=raw, value=raw / (100 * w.total))


def impact_rating(score: ImpactScore | Fraction) -> ImpactRating:
    x = score.value if isinstance(score, ImpactScore) else Fraction(score)
    if x < 0 or x > 1:
        raise ValueError(f"normalised impact score out of range: {x}")
    if x == 0:
        return ImpactRating.NONE
    if x < Fraction(1, 100):
        return ImpactRating.LOW
    if x < Fraction(5, 100):
        return ImpactRating.MEDIUM
    if x < Fraction(45, 100):
        return ImpactRating.HIGH
    return ImpactRating.CRITICAL


def describe_level(objective: str, level: ImpactLevel | str) -> str:
    if objective not in LEVEL_DESCRIPTIONS:
        raise ValueError(f"unknown impact objective {objective!r}")
    if not isinstance(level, ImpactLevel):
        level = ImpactLevel.parse(level)
    return LEVEL_DESCRIPTIONS[objective][level]
