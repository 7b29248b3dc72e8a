"""Automotive threat analysis and risk assessment.

CVSS v3.1 attack feasibility, HEAVENS-style impact scoring, attack trees, a
5x5 risk matrix and disclosure-driven model updates.
"""

from .cvss import MetricSet, Score, base_score, format_vector, parse_vector, severity, temporal_score
from .impact import ImpactVector, ImpactWeights, impact_rating, impact_score
from .io import bundled, load_event, load_model, save_model
from .model import DisclosureEvent, SecurityModel, Threat, validate
from .risk import assess
from .update import apply_event, diff, ingest_cve

__all__ = [
    "DisclosureEvent", "ImpactVector", "ImpactWeights", "MetricSet", "Score", "SecurityModel",
    "Threat", "apply_event", "assess", "base_score", "bundled", "diff", "format_vector",
    "impact_rating", "impact_score", "ingest_cve", "load_event", "load_model", "parse_vector",
    "save_model", "severity", "temporal_score", "validate",
]
