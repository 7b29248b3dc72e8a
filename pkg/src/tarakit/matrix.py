"""5x5 risk matrix: attack feasibility (rows) x impact rating (columns)."""

from __future__ import annotations

from dataclasses import dataclass

from .levels import ImpactRating, RiskRating, SeverityRating

_L, _M, _H, _E = RiskRating.LOW, RiskRating.MEDIUM, RiskRating.HIGH, RiskRating.EXTREME

DEFAULT_CELLS = (
    (_L, _L, _L, _M, _M),  # None
    (_L, _M, _M, _H, _H),  # Low
    (_L, _M, _M, _H, _E),  # Medium
    (_M, _M, _H, _E, _E),  # High
    (_M, _H, _H, _E, _E),  # Critical
)


class MatrixError(ValueError):
    pass


@dataclass(frozen=True)
class RiskMatrix:
    cells: tuple[tuple[RiskRating, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(RiskRating.parse(c) if not isinstance(c, RiskRating) else c
                           for c in row) for row in self.cells)
        object.__setattr__(self, "cells", rows)
        problems = matrix_problems(rows)
        if problems:
            raise MatrixError("; ".join(problems))

    def lookup(self, feasibility: SeverityRating, impact: ImpactRating) -> RiskRating:
        return self.cells[feasibility.rank][impact.rank]

    def to_dict(self) -> dict[str, list[str]]:
        return {
            f.value: [c.value for c in row] for f, row in zip(SeverityRating, self.cells)
        }

    @classmethod
    def from_dict(cls, data: dict) -> RiskMatrix:
        if not isinstance(data, dict):
            raise MatrixError("matrix must map feasibility levels to rows")
        expected = [f.value for f in SeverityRating]
        unknown = sorted(set(data) - set(expected))
        if unknown:
            raise MatrixError(f"unknown feasibility row {unknown[0]!r}")
        missing = [k for k in expected if k not in data]
        if missing:
            raise MatrixError(f"matrix row {missing[0]!r} missing")
        try:
            return cls(tuple(tuple(data[k]) for k in expected))
        except ValueError as exc:
            raise MatrixError(str(exc)) from None


def matrix_problems(rows) -> list[str]:
    """Checks that the grid is 5x5 and nondecreasing along both axes."""
    if len(rows) != 5 or any(len(r) != 5 for r in rows):
        return ["risk matrix must have 5 rows of 5 cells"]
    feas, imp = list(SeverityRating), list(ImpactRating)
    problems = []
    for r in range(5):
        for c in range(5):
            if r + 1 < 5 and rows[r + 1][c] < rows[r][c]:
                problems.append(
                    f"risk decreases from feasibility {feas[r]} to {feas[r + 1]} at impact {imp[c]}"
                )
            if c + 1 < 5 and rows[r][c + 1] < rows[r][c]:
                problems.append(
                    f"risk decreases from impact {imp[c]} to {imp[c + 1]} at feasibility {feas[r]}"
                )
    return problems


DEFAULT_MATRIX = RiskMatrix(DEFAULT_CELLS)
