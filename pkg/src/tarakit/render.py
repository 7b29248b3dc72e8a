"""Text renderings of registers, change reports and full assessment reports."""

from __future__ import annotations

import csv
import io
import json

from .attack_tree import UnscoredLeafError, enumerate_paths, path_feasibility
from .cvss import BASE_METRICS, TEMPORAL_METRICS
from .impact import OBJECTIVES, describe_level
from .levels import ImpactRating, SeverityRating
from .matrix import DEFAULT_MATRIX
from .model import SecurityModel
from .risk import RiskRegister, assess
from .update import ChangeReport

FORMATS = ("markdown", "csv", "json", "ascii-matrix")

REGISTER_COLUMNS = (
    "Threat ID", "CVSS Score", "Attack Feasibility", "Impact Rating", "Risk Rating", "Impact Score",
)


def _cells(row) -> list[str]:
    return [
        str(row.threat_id),
        str(row.cvss_temporal),
        str(row.feasibility),
        str(row.impact) if row.impact is not None else "n/a",
        str(row.risk) if row.risk is not None else "n/a",
        str(row.impact_score) if row.impact_score is not None else "n/a",
    ]


def _md_table(header, rows) -> list[str]:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return lines


def register_markdown(register: RiskRegister) -> str:
    lines = [f"# Risk register (model version {register.model_version})", ""]
    lines += _md_table(REGISTER_COLUMNS, [_cells(r) for r in register.rows])
    if register.goals:
        lines += ["", "## Attacker goals", ""]
        rows = []
        for g in register.goals:
            if g.score is None:
                rows.append([g.persona, g.tree, "n/a", "-", g.note])
            else:
                rows.append([g.persona, g.tree, str(g.score), "{" + ", ".join(g.best_path) + "}", ""])
        lines += _md_table(("Persona", "Tree", "Goal Feasibility", "Easiest Path", "Note"), rows)
    if register.warnings:
        lines += ["", "## Warnings", ""]
        lines += [f"- {w}" for w in register.warnings]
    return "\n".join(lines) + "\n"


def register_csv(register: RiskRegister) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(REGISTER_COLUMNS)
    for row in register.rows:
        writer.writerow(_cells(row))
    return out.getvalue()


def register_json(register: RiskRegister) -> str:
    data = {
        "model_version": register.model_version,
        "rows": [dict(zip(REGISTER_COLUMNS, _cells(r))) for r in register.rows],
        "goals": [
            {
                "persona": g.persona,
                "tree": g.tree,
                "score": str(g.score) if g.score is not None else None,
                "best_path": list(g.best_path),
                "note": g.note,
            }
            for g in register.goals
        ],
        "warnings": list(register.warnings),
    }
    return json.dumps(data, indent=2) + "\n"


def register_ascii_matrix(register: RiskRegister, matrix) -> str:
    """The 5x5 grid, feasibility rows from Critical down, with each cell's
    risk rating and the threats that land in it."""
    placed: dict[tuple[int, int], list[str]] = {}
    for row in register.rows:
        if row.impact is not None:
            placed.setdefault((row.feasibility.rank, row.impact.rank), []).append(str(row.threat_id))
    cells = {}
    for f in SeverityRating:
        for i in ImpactRating:
            ids = placed.get((f.rank, i.rank), [])
            text = matrix.lookup(f, i).value
            if ids:
                text += " [" + ",".join(ids) + "]"
            cells[f.rank, i.rank] = text
    label_w = max(len(f.value) for f in SeverityRating)
    col_w = max(max(len(c) for c in cells.values()), max(len(i.value) for i in ImpactRating))
    sep = "+" + "-" * (label_w + 2) + ("+" + "-" * (col_w + 2)) * 5 + "+"
    lines = [
        "Feasibility \\ Impact",
        sep,
        "| " + " " * label_w + " | " + " | ".join(i.value.ljust(col_w) for i in ImpactRating) + " |",
        sep,
    ]
    for f in reversed(list(SeverityRating)):
        lines.append(
            "| " + f.value.ljust(label_w) + " | "
            + " | ".join(cells[f.rank, i.rank].ljust(col_w) for i in ImpactRating) + " |"
        )
        lines.append(sep)
    return "\n".join(lines) + "\n"


def render_register(register: RiskRegister, fmt: str, matrix=None) -> str:
    if fmt == "markdown":
        return register_markdown(register)
    if fmt == "csv":
        return register_csv(register)
    if fmt == "json":
        return register_json(register)
    if fmt == "ascii-matrix":
        return register_ascii_matrix(register, matrix or DEFAULT_MATRIX)
    raise ValueError(f"unknown report format {fmt!r} (expected one of: {', '.join(FORMATS)})")


def render_changes(report: ChangeReport) -> str:
    lines = [f"Changes from model version {report.before_version} to {report.after_version}"]
    if not report.rows:
        lines.append("(no changes)")
    for row in report.rows:
        lines.append(f"{row.threat_id}  {row.field}: {row.before or '-'} -> {row.after or '-'}")
    return "\n".join(lines) + "\n"


def render_paths(model: SecurityModel, persona_id: str) -> str:
    persona = model.persona_by_id(persona_id)
    tree = model.tree_by_id(persona.tree)
    lines = [f"Persona {persona.id}: {persona.name}", f"Goal: {persona.goal}", ""]
    for n, path in enumerate(enumerate_paths(tree), 1):
        try:
            score = str(path_feasibility(path, tree, model))
        except UnscoredLeafError:
            score = "unscored"
        lines.append(f"Path {n} (feasibility {score}):")
        for leaf_id in path.sort_key:
            leaf = tree.nodes[leaf_id]
            ref = f" [threat {leaf.threat}]" if leaf.threat is not None else " [no threat]"
            lines.append(f"  - {leaf_id}: {leaf.label}{ref}")
    return "\n".join(lines) + "\n"


def render_full_report(model: SecurityModel) -> str:
    """Threat list, feasibility, impact (with level definitions) and risk tables."""
    register = assess(model)
    assets = {a.id: a.name for a in model.assets}
    threats = sorted(model.threats, key=lambda t: t.id)
    out = [f"# Security assessment (model version {model.model_version})", ""]

    out += ["## Threats", ""]
    out += _md_table(
        ("Component", "Threat ID", "Threat Details", "Threat Category"),
        [[assets.get(t.source, t.source), str(t.id), t.details, t.category.value] for t in threats],
    )

    out += ["", "## Attack feasibility", ""]
    keys = BASE_METRICS + TEMPORAL_METRICS
    out += _md_table(
        ("Threat ID",) + keys + ("CVSS Score", "Attack Feasibility"),
        [
            [str(t.id)] + [t.metrics[k] for k in keys]
            + [str(register.row(t.id).cvss_temporal), str(register.row(t.id).feasibility)]
            for t in threats
        ],
    )

    out += ["", "## Impact", ""]
    rows = []
    for t in threats:
        r = register.row(t.id)
        values = [str(lv.numeric) if lv is not None else "n/a" for lv in t.impact.levels()]
        rows.append([str(t.id), *values, str(r.impact_score or "n/a"), str(r.impact or "n/a")])
    out += _md_table(("Threat ID", "i_s", "i_o", "i_f", "i_p", "Impact Score", "Impact Rating"), rows)
    out += [""]
    for t in threats:
        if not t.impact.complete:
            continue
        out.append(f"- {t.id}: " + "; ".join(
            f"{name} {level.value}: {describe_level(name, level)}"
            for name, level in zip(OBJECTIVES, t.impact.levels())
        ))

    out += ["", "## Risk", ""]
    out.append(register_markdown(register).split("\n", 2)[2].rstrip("\n"))
    return "\n".join(out) + "\n"
