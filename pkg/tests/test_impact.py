import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tarakit.impact import (
    OBJECTIVES,
    ImpactVector,
    ImpactWeights,
    describe_level,
    format_fraction,
    impact_rating,
    impact_score,
)
from tarakit.levels import ImpactLevel, ImpactRating

LOG_SCALE = {"None": 0, "Low": 1, "Medium": 10, "High": 100}
N, L, M, H = (ImpactLevel.parse(x) for x in ("None", "Low", "Medium", "High"))

levels = st.sampled_from(list(ImpactLevel))
vectors = st.builds(ImpactVector, levels, levels, levels, levels)
weights = st.builds(
    ImpactWeights,
    *[st.fractions(min_value=Fraction(1, 100), max_value=100) for _ in OBJECTIVES],
)


def test_numeric_scale():
    assert [lv.numeric for lv in ImpactLevel] == [0, 1, 10, 100]


def test_threat_9146_example():
    s = impact_score(ImpactVector(N, N, N, M))
    assert s.raw == 10 and s.value == Fraction(10, 1300)
    assert str(s) == "0.0077"
    assert impact_rating(s) == ImpactRating.LOW


def test_updated_table_row_numeric_values():
    # the updated table lists i_s, i_o, i_f, i_p = 10, 10, 10, 100
    s = impact_score(ImpactVector(M, M, M, H))
    assert s.value == Fraction(220, 1300)
    assert str(s) == "0.1692"
    assert impact_rating(s) == ImpactRating.HIGH


def test_low_low_low_high_on_log_scale():
    s = impact_score(ImpactVector(L, L, L, H))
    assert s.value == Fraction(112, 1300)
    assert str(s) == "0.0862"
    assert impact_rating(s) == ImpactRating.HIGH


def test_zero_and_ceiling():
    assert impact_score(ImpactVector(N, N, N, N)).value == 0
    assert impact_rating(impact_score(ImpactVector(N, N, N, N))) == ImpactRating.NONE
    top = impact_score(ImpactVector(H, H, H, H))
    assert top.value == 1
    assert impact_rating(top) == ImpactRating.CRITICAL


@pytest.mark.parametrize(
    "x, rating",
    [
        (Fraction(0), "None"),
        (Fraction(1, 10**9), "Low"),
        (Fraction(99, 10000), "Low"),
        (Fraction(1, 100), "Medium"),
        (Fraction(499, 10000), "Medium"),
        (Fraction(5, 100), "High"),
        (Fraction(4499, 10000), "High"),
        (Fraction(45, 100), "Critical"),
        (Fraction(1), "Critical"),
    ],
)
def test_rating_thresholds(x, rating):
    assert impact_rating(x) == ImpactRating.parse(rating)


def test_rating_rejects_out_of_range():
    with pytest.raises(ValueError):
        impact_rating(Fraction(11, 10))


def test_half_up_rendering():
    assert format_fraction(Fraction(10, 1300)) == "0.0077"
    assert format_fraction(Fraction(220, 1300)) == "0.1692"
    assert format_fraction(Fraction(5, 100000)) == "0.0001"  # truncation would give 0.0000


def test_default_weights_equal_simplified_form_on_all_vectors():
    count = 0
    for combo in itertools.product(LOG_SCALE, repeat=4):
        v = ImpactVector(*combo)
        s, o, f, p = (LOG_SCALE[c] for c in combo)
        assert impact_score(v).value == Fraction(10 * s + o + f + p, 1300)
        count += 1
    assert count == 256


def test_unassessed_vector_cannot_be_scored():
    with pytest.raises(ValueError, match="safety"):
        impact_score(ImpactVector(None, N, N, N))


def test_weights_must_be_positive():
    with pytest.raises(ValueError):
        ImpactWeights(0, 1, 1, 1)


def test_custom_weights():
    w = ImpactWeights(1, 1, 1, 1)
    assert impact_score(ImpactVector(H, N, N, N), w).value == Fraction(1, 4)


@pytest.mark.parametrize(
    "objective, level, text",
    [
        ("safety", "Medium", "Severe and life-threatening injuries (survival probable)"),
        ("safety", "Low", "Light and moderate injuries"),
        ("operational", "None", "No discernible effect"),
        ("financial", "None", "No discernible effect. No appreciable consequences"),
    ],
)
def test_describe_level(objective, level, text):
    assert describe_level(objective, level) == text


def test_describe_level_operational_medium():
    assert describe_level("operational", "Medium").startswith("Degradation of primary function")


def test_every_objective_and_level_described():
    for objective in OBJECTIVES:
        for level in ImpactLevel:
            assert describe_level(objective, level)


@given(vectors, weights)
def test_normalised_range(v, w):
    assert 0 <= impact_score(v, w).value <= 1


@given(weights)
def test_all_high_is_one_for_any_weights(w):
    assert impact_score(ImpactVector(H, H, H, H), w).value == 1


@given(vectors, st.sampled_from(OBJECTIVES), weights)
def test_monotone_in_each_objective(v, objective, w):
    current = getattr(v, objective)
    for higher in ImpactLevel:
        if higher > current:
            raised = v.with_overrides({objective: higher})
            assert impact_score(raised, w).value >= impact_score(v, w).value
            assert impact_rating(impact_score(raised, w)) >= impact_rating(impact_score(v, w))
