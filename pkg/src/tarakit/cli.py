"""Command-line interface.

Exit codes: 0 success, 1 validation or parse error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from .cvss import CvssError
from .io import ModelFileError, dumps, event_to_json, load_event, load_feed, load_model, save_model
from .matrix import MatrixError
from .model import ModelValidationError, validate
from .render import FORMATS, render_changes, render_full_report, render_paths, render_register
from .risk import assess, effective_matrix
from .update import CveFeedError, EventError, apply_event, diff, ingest_cve

# everything that means "your input is wrong", as opposed to a usage error
INPUT_ERRORS = (ModelFileError, ModelValidationError, EventError, CveFeedError, CvssError, MatrixError)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    model = load_model(args.model, validate=False)
    report = validate(model)
    for issue in report.issues:
        print(issue)
    print(f"{len(report.errors)} error(s), {len(report.warnings)} warning(s)")
    return 0 if report.ok else 1


def cmd_assess(args) -> int:
    model = load_model(args.model)
    register = assess(model)
    _emit(render_register(register, args.format, effective_matrix(model)), args.out)
    return 0


def cmd_report(args) -> int:
    _emit(render_full_report(load_model(args.model)), args.out)
    return 0


def cmd_tree_paths(args) -> int:
    model = load_model(args.model)
    try:
        text = render_paths(model, args.persona)
    except KeyError:
        known = ", ".join(p.id for p in model.personas)
        print(f"error: unknown persona {args.persona!r} (known: {known})", file=sys.stderr)
        return 1
    sys.stdout.write(text)
    return 0


def cmd_apply_event(args) -> int:
    model = load_model(args.model)
    event = load_event(args.event)
    updated, report = apply_event(model, event)
    save_model(updated, args.out)
    sys.stdout.write(render_changes(report))
    return 0


def cmd_diff(args) -> int:
    a = load_model(args.model_a)
    b = load_model(args.model_b)
    sys.stdout.write(render_changes(diff(a, b)))
    return 0


def cmd_import_cve(args) -> int:
    model = load_model(args.model)
    feed = load_feed(args.feed)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        candidates = ingest_cve(feed, model)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    sys.stdout.write(dumps([event_to_json(e) for e in candidates]))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tarakit",
        description="Threat analysis and risk assessment for automotive security models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a model file's integrity")
    p.add_argument("model")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("assess", help="compute the risk register")
    p.add_argument("model")
    p.add_argument("--format", choices=FORMATS, default="markdown")
    p.add_argument("--out", help="write to this file instead of stdout")
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("report", help="full assessment tables incl. impact definitions")
    p.add_argument("model")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("tree-paths", help="list attack paths of a persona's attack tree")
    p.add_argument("model")
    p.add_argument("--persona", required=True)
    p.set_defaults(func=cmd_tree_paths)

    p = sub.add_parser("apply-event", help="apply a disclosure event, writing the next model version")
    p.add_argument("model")
    p.add_argument("event")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_apply_event)

    p = sub.add_parser("diff", help="compare two model versions")
    p.add_argument("model_a")
    p.add_argument("model_b")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("import-cve", help="propose disclosure events from a CVE feed file")
    p.add_argument("model")
    p.add_argument("feed")
    p.set_defaults(func=cmd_import_cve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
