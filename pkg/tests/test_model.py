from dataclasses import replace

import pytest

from tarakit.attack_tree import AttackTree, Gate, Leaf
from tarakit.cvss import parse_vector
from tarakit.model import (
    Asset,
    AttackerPersona,
    DataFlow,
    DisclosureEvent,
    ModelValidationError,
    SecurityModel,
    StrideCategory,
    Threat,
    ThreatNotFound,
    TrustBoundary,
    require_valid,
    threat_by_id,
    validate,
)

VECTOR = parse_vector("AV:P/AC:H/PR:N/UI:R/S:U/C:H/I:L/A:N/E:U/RL:U/RC:U")


def small_model(**changes):
    base = SecurityModel(
        assets=(Asset("ivi", "IVI", "module"), Asset("usb", "USB", "module")),
        flows=(DataFlow("f1", "usb", "ivi", "usb", True),),
        boundaries=(TrustBoundary("vehicle", "Vehicle", {"ivi", "usb"}),),
        threats=(Threat(1, "t", StrideCategory.TAMPERING, "ivi", VECTOR),),
        personas=(AttackerPersona("p", "P", "goal", "tree"),),
        trees=(AttackTree("tree", "L", {"L": Leaf("leaf", 1)}),),
    )
    return replace(base, **changes)


def errors(model):
    return [str(i) for i in validate(model).errors]


def test_ghost_source_is_one_error():
    model = small_model(threats=(Threat(1, "t", StrideCategory.TAMPERING, "ghost", VECTOR),))
    errs = validate(model).errors
    assert len(errs) == 1
    assert "unresolved asset reference" in errs[0].message


def test_empty_model_is_clean():
    report = validate(SecurityModel())
    assert report.errors == [] and report.warnings == []


def test_fixture_has_no_errors(ivi_v1):
    report = validate(ivi_v1)
    assert report.ok
    assert len(ivi_v1.threats) == 13


def test_unassessed_impact_is_only_a_warning():
    report = validate(small_model())
    assert report.ok
    assert [i.path for i in report.warnings] == ["threats[0].impact"]


@pytest.mark.parametrize(
    "changes, fragment",
    [
        ({"flows": (DataFlow("f1", "usb", "nowhere", "usb"),)}, "unresolved asset reference 'nowhere'"),
        ({"flows": (DataFlow("f1", "usb", "usb", "usb"),)}, "same asset"),
        ({"flows": (DataFlow("f1", "usb", "ivi", "carrier-pigeon"),)}, "unknown channel"),
        ({"boundaries": (TrustBoundary("b", "B", {"ghost"}),)}, "unresolved asset reference 'ghost'"),
        ({"personas": (AttackerPersona("p", "P", "g", "missing"),)}, "unresolved attack tree reference"),
        ({"trees": (AttackTree("tree", "L", {"L": Leaf("leaf", 77)}),)}, "unresolved threat reference 77"),
        ({"trees": (AttackTree("tree", "R", {"R": Gate("R", "OR", ("X",))}),)}, "unknown node"),
        ({"assets": (Asset("ivi", "IVI", "module"), Asset("usb", "USB", "gadget"))}, "unknown asset kind"),
        ({"model_version": 3}, "does not match 0 applied event"),
    ],
)
def test_dangling_or_bad_references(changes, fragment):
    errs = errors(small_model(**changes))
    assert any(fragment in e for e in errs), errs


def test_duplicate_ids():
    assets = (Asset("ivi", "IVI", "module"), Asset("ivi", "again", "module"), Asset("usb", "USB", "module"))
    assert any("duplicate id 'ivi'" in e for e in errors(small_model(assets=assets)))
    t = Threat(1, "t", StrideCategory.TAMPERING, "ivi", VECTOR)
    assert any("duplicate id 1" in e for e in errors(small_model(threats=(t, t))))


def test_threat_id_must_be_positive():
    t = Threat(0, "t", StrideCategory.TAMPERING, "ivi", VECTOR)
    assert any("positive integer" in e for e in errors(small_model(threats=(t,))))


def test_event_targets_checked():
    event = DisclosureEvent("e", "ref", (99,), {"E": "P"})
    errs = errors(small_model(events=(event,), model_version=2))
    assert any("unresolved threat reference 99" in e for e in errs)


def test_require_valid_raises_with_report():
    bad = small_model(threats=(Threat(1, "t", StrideCategory.TAMPERING, "ghost", VECTOR),))
    with pytest.raises(ModelValidationError) as info:
        require_valid(bad)
    assert len(info.value.report.errors) == 1


def test_every_dangling_insertion_is_detected(ivi_v1):
    # referential closure: pointing any threat at a ghost asset yields an error
    for index, threat in enumerate(ivi_v1.threats):
        threats = list(ivi_v1.threats)
        threats[index] = replace(threat, source="ghost")
        assert not validate(replace(ivi_v1, threats=tuple(threats))).ok


def test_lookup_examples(ivi_v1):
    assert "reverse engineer the head unit firmware" in threat_by_id(ivi_v1, 9146).details
    assert "inject or flood invalid data" in threat_by_id(ivi_v1, 9132).details
    with pytest.raises(ThreatNotFound) as info:
        threat_by_id(ivi_v1, 1)
    assert info.value.threat_id == 1


def test_stride_parse():
    assert StrideCategory.parse("InformationDisclosure") is StrideCategory.INFORMATION_DISCLOSURE
    assert StrideCategory.parse("denial of service") is StrideCategory.DENIAL_OF_SERVICE
    with pytest.raises(ValueError):
        StrideCategory.parse("Mischief")


def test_values_are_immutable(ivi_v1):
    with pytest.raises(AttributeError):
        ivi_v1.model_version = 5
    with pytest.raises(AttributeError):
        ivi_v1.threats[0].id = 5
