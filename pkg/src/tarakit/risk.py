"""Risk register: per-threat feasibility, impact and risk through the matrix."""

from __future__ import annotations

from dataclasses import dataclass, field

from .attack_tree import UnscoredLeafError, goal_feasibility
from .cvss import Score, severity, temporal_score
from .impact import ImpactScore, ImpactWeights, impact_rating, impact_score
from .levels import ImpactRating, RiskRating, SeverityRating
from .matrix import DEFAULT_MATRIX, RiskMatrix
from .model import SecurityModel, Threat, require_valid


def risk_rating(matrix: RiskMatrix, feasibility: SeverityRating, impact: ImpactRating) -> RiskRating:
    return matrix.lookup(feasibility, impact)


@dataclass(frozen=True)
class RegisterRow:
    threat_id: int
    cvss_temporal: Score
    feasibility: SeverityRating
    impact_score: ImpactScore | None
    impact: ImpactRating | None
    risk: RiskRating | None


@dataclass(frozen=True)
class GoalRow:
    persona: str
    tree: str
    score: Score | None
    best_path: tuple[str, ...]
    note: str = ""


@dataclass(frozen=True)
class RiskRegister:
    model_version: int
    rows: tuple[RegisterRow, ...] = ()
    goals: tuple[GoalRow, ...] = ()
    warnings: tuple[str, ...] = field(default=())

    def row(self, threat_id: int) -> RegisterRow:
        for r in self.rows:
            if r.threat_id == threat_id:
                return r
        raise KeyError(threat_id)


def score_threat(threat: Threat, weights: ImpactWeights, matrix: RiskMatrix) -> RegisterRow:
    temporal = temporal_score(threat.metrics)
    feas = severity(temporal)
    if not threat.impact.complete:
        return RegisterRow(threat.id, temporal, feas, None, None, None)
    i_score = impact_score(threat.impact, weights)
    i_rating = impact_rating(i_score)
    return RegisterRow(threat.id, temporal, feas, i_score, i_rating, matrix.lookup(feas, i_rating))


def effective_matrix(model: SecurityModel, matrix: RiskMatrix | None = None) -> RiskMatrix:
    if matrix is not None:
        return matrix
    return model.matrix if model.matrix is not None else DEFAULT_MATRIX


def assess(model: SecurityModel, matrix: RiskMatrix | None = None) -> RiskRegister:
    """Score every threat and look its risk up in ``matrix``.

    Without an explicit matrix the model's override is used, falling back to
    the default grid.
    """
    require_valid(model)
    matrix = effective_matrix(model, matrix)
    rows, warnings = [], []
    for threat in sorted(model.threats, key=lambda t: t.id):
        row = score_threat(threat, model.weights, matrix)
        rows.append(row)
        if row.impact is None:
            warnings.append(f"threat {threat.id}: impact not assessed, risk not rated")

        rec = threat.recorded
        if rec is not None:
            for label, recorded, computed in (
                ("attack feasibility", rec.feasibility, row.feasibility),
                ("impact rating", rec.impact, row.impact),
                ("risk rating", rec.risk, row.risk),
            ):
                if recorded is not None and recorded != computed:
                    warnings.append(
                        f"threat {threat.id}: recorded {label} {recorded} differs from "
                        f"computed {computed}"
                        + (f" (CVSS {row.cvss_temporal})" if label == "attack feasibility" else "")
                    )

    goals = []
    for persona in sorted(model.personas, key=lambda p: p.id):
        tree = model.tree_by_id(persona.tree)
        try:
            result = goal_feasibility(tree, model)
        except UnscoredLeafError as exc:
            goals.append(GoalRow(persona.id, tree.id, None, (), f"not computable: {exc}"))
        else:
            goals.append(GoalRow(persona.id, tree.id, result.score, result.best_path.sort_key))
    return RiskRegister(model.model_version, tuple(rows), tuple(goals), tuple(warnings))
