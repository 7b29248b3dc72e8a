import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import pytest

from tarakit.levels import ImpactRating, RiskRating, SeverityRating
from tarakit.matrix import DEFAULT_CELLS, DEFAULT_MATRIX, MatrixError, RiskMatrix, matrix_problems
from tarakit.cvss import parse_vector
from tarakit.impact import DEFAULT_WEIGHTS
from tarakit.model import SecurityModel, StrideCategory, Threat
from tarakit.risk import assess, risk_rating, score_threat

F = SeverityRating.parse
I = ImpactRating.parse

# (feasibility, impact) -> risk pairs observed in the IVI risk table
OBSERVED = [
    ("Medium", "High", "High"),
    ("Low", "Low", "Medium"),
    ("High", "Critical", "Extreme"),
    ("Medium", "Low", "Medium"),
]

# risk-rating column of the pre-disclosure risk table
RISK_COLUMN = {9132: "Extreme", 9159: "High", 9089: "Medium", 9144: "Medium", 9060: "Medium", 9146: "Medium"}


@pytest.mark.parametrize("f, i, risk", OBSERVED + [("None", "None", "Low")])
def test_lookup_examples(f, i, risk):
    assert risk_rating(DEFAULT_MATRIX, F(f), I(i)) == RiskRating.parse(risk)


def test_default_matrix_total_and_monotone():
    assert matrix_problems(DEFAULT_CELLS) == []
    for f, i in itertools.product(SeverityRating, ImpactRating):
        assert isinstance(DEFAULT_MATRIX.lookup(f, i), RiskRating)
    for f, g in itertools.pairwise(SeverityRating):
        for i in ImpactRating:
            assert DEFAULT_MATRIX.lookup(f, i) <= DEFAULT_MATRIX.lookup(g, i)
    for i, j in itertools.pairwise(ImpactRating):
        for f in SeverityRating:
            assert DEFAULT_MATRIX.lookup(f, i) <= DEFAULT_MATRIX.lookup(f, j)


def test_non_monotone_matrix_rejected():
    cells = [list(r) for r in DEFAULT_CELLS]
    cells[4][4] = "Low"
    with pytest.raises(MatrixError):
        RiskMatrix(cells)


def test_wrong_shape_rejected():
    with pytest.raises(MatrixError):
        RiskMatrix(DEFAULT_CELLS[:4])


def test_matrix_dict_round_trip():
    assert RiskMatrix.from_dict(DEFAULT_MATRIX.to_dict()) == DEFAULT_MATRIX


def test_assess_v1_risk_column(ivi_v1):
    register = assess(ivi_v1)
    for tid, risk in RISK_COLUMN.items():
        assert str(register.row(tid).risk) == risk
    row = register.row(9146)
    assert (str(row.feasibility), str(row.impact), str(row.risk)) == ("Low", "Low", "Medium")


def test_assess_v1_surfaces_9132_discrepancy(ivi_v1):
    register = assess(ivi_v1)
    assert str(register.row(9132).feasibility) == "Medium"
    assert any(w.startswith("threat 9132: recorded attack feasibility High") for w in register.warnings)


def test_assess_v2_row_9146(ivi_v2):
    row = assess(ivi_v2).row(9146)
    assert (str(row.cvss_temporal), str(row.feasibility), str(row.impact), str(row.risk)) == (
        "6.4", "Medium", "High", "High",
    )


def test_empty_model_empty_register():
    register = assess(SecurityModel())
    assert register.rows == () and register.goals == () and register.warnings == ()


def test_rows_sorted_by_threat_id(ivi_v1):
    ids = [r.threat_id for r in assess(ivi_v1).rows]
    assert ids == sorted(ids) and len(ids) == 13


def test_goals_reported(ivi_v1):
    goals = {g.persona: g for g in assess(ivi_v1).goals}
    assert str(goals["persona-a"].score) == "4.5"
    assert goals["persona-b"].score is None
    assert "not computable" in goals["persona-b"].note


def test_matrix_override_used(ivi_v1):
    all_extreme = RiskMatrix([["Extreme"] * 5 for _ in range(5)])
    assert all(r.risk == RiskRating.EXTREME for r in assess(ivi_v1, all_extreme).rows)
    model = replace(ivi_v1, matrix=all_extreme)
    assert all(r.risk == RiskRating.EXTREME for r in assess(model).rows)


def test_deterministic_across_threads(ivi_v1):
    first = assess(ivi_v1)
    with ThreadPoolExecutor(4) as pool:
        results = list(pool.map(lambda _: assess(ivi_v1), range(8)))
    assert all(r == first for r in results)


def test_threat_without_impact_has_no_risk():
    t = Threat(5, "t", StrideCategory.SPOOFING, "ivi", parse_vector("AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H"))
    row = score_threat(t, DEFAULT_WEIGHTS, DEFAULT_MATRIX)
    assert str(row.cvss_temporal) == "9.8"
    assert row.impact_score is None and row.risk is None
