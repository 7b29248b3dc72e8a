"""Ordered qualitative scales shared by the scoring modules."""

from __future__ import annotations

from enum import Enum


class RankedLabel(str, Enum):
    """A string enum whose members compare by declaration order, not text."""

    @property
    def rank(self) -> int:
        return list(type(self)).index(self)

    @classmethod
    def parse(cls, text: str):
        for member in cls:
            if member.value.lower() == str(text).strip().lower():
                return member
        allowed = ", ".join(m.value for m in cls)
        raise ValueError(f"unknown {cls.__name__} {text!r} (expected one of: {allowed})")

    def _cmp(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.rank - other.rank

    def __lt__(self, other):
        d = self._cmp(other)
        return d if d is NotImplemented else d < 0

    def __le__(self, other):
        d = self._cmp(other)
        return d if d is NotImplemented else d <= 0

    def __gt__(self, other):
        d = self._cmp(other)
        return d if d is NotImplemented else d > 0

    def __ge__(self, other):
        d = self._cmp(other)
        return d if d is NotImplemented else d >= 0

    def __str__(self) -> str:
        return self.value


class SeverityRating(RankedLabel):
    """CVSS qualitative severity; used as the attack feasibility axis."""

    NONE = "None"
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"
    CRITICAL = "Critical"


class ImpactRating(RankedLabel):
    NONE = "None"
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"
    CRITICAL = "Critical"


class ImpactLevel(RankedLabel):
    """Per-objective impact level on the logarithmic 0/1/10/100 scale."""

    NONE = "None"
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"

    @property
    def numeric(self) -> int:
        return _IMPACT_VALUES[self]


_IMPACT_VALUES = {
    ImpactLevel.NONE: 0,
    ImpactLevel.LOW: 1,
    ImpactLevel.MEDIUM: 10,
    ImpactLevel.HIGH: 100,
}


class RiskRating(RankedLabel):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"
    EXTREME = "Extreme"
