"""Command-line interface: analyze a source file, report per function.

Exit codes: 0 when every analyzed function is bounded or conditionally
bounded, 1 when some function is unbounded (or an inline check fails),
2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import __version__
from .analysis import UNBOUNDED, FunctionAnalysis, analyze_program
from .frontend import ParseError, parse, render
from .inline import check_call_theorem
from .semiring import INF, value_char


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mwpflow",
        description="Certify polynomial growth bounds of program variables.",
    )
    p.add_argument("file", help="source file to analyze (conventionally .imp)")
    p.add_argument("--function", metavar="NAME", help="report only this function")
    p.add_argument(
        "--eval", metavar="PICKS", dest="eval_picks",
        help="print the flow matrix for one comma-separated choice assignment",
    )
    p.add_argument("--json", action="store_true", help="emit a machine-readable report")
    p.add_argument(
        "--fast", action="store_true",
        help="qualitative verdict from the delta graph only, skipping enumeration",
    )
    p.add_argument("--dump-ast", action="store_true", help=argparse.SUPPRESS)
    p.add_argument(
        "--check-inline", nargs=2, metavar=("CALLER", "CALLEE"), help=argparse.SUPPRESS
    )
    return p


def _verdict_text(v: str) -> str:
    return v.replace("_", "-")


def render_report(results: Sequence[FunctionAnalysis], show_timing: bool = True) -> str:
    lines = [f"mwpflow {__version__}"]
    for r in results:
        lines.append("")
        lines.append(f"function {r.name}")
        lines.append(f"  variables: {' '.join(r.variables)}")
        cards = r.registry.cardinalities
        if cards:
            doms = " ".join(f"#{i}:{c}" for i, c in enumerate(cards))
            lines.append(f"  choices: {len(cards)} ({doms})")
        else:
            lines.append("  choices: none")
        lines.append("  matrix (rows flow into columns):")
        width = max((len(str(p)) for row in r.matrix.entries for p in row), default=1)
        name_w = max(len(v) for v in r.variables) if r.variables else 0
        for i, row in enumerate(r.matrix.entries):
            cells = "  ".join(str(p).ljust(width) for p in row)
            lines.append(f"    {r.variables[i].ljust(name_w)}  {cells}")
        lines.append(f"  verdict: {_verdict_text(r.verdict)}")
        if r.clean_count is not None:
            lines.append(
                f"  infinity-free assignments: {r.clean_count} of {r.total_assignments}"
            )
        if r.sample is not None:
            lines.append(f"  sample assignment: {','.join(map(str, r.sample)) or '(empty)'}")
        if r.blame:
            pairs = ", ".join(f"{a} -> {b}" for a, b in r.blame)
            lines.append(f"  blame: {pairs}")
        if r.summary is not None:
            lines.append(f"  behaviors ({len(r.summary.behaviors)}):")
            for vec in r.summary.behaviors:
                flows = ", ".join(
                    f"{v}:{value_char(f)}" for v, f in zip(r.summary.rows, vec) if f
                )
                lines.append(f"    {{{flows}}}")
        if show_timing:
            lines.append(f"  elapsed: {r.elapsed * 1000:.1f} ms")
    lines.append("")
    return "\n".join(lines)


def _json_poly(poly) -> dict:
    return {
        "monomials": [
            {
                "scalar": "inf" if m.scalar == INF else value_char(m.scalar),
                "deltas": [[v, i] for i, v in m.deltas],
            }
            for m in poly.monomials
        ]
    }


def emit_json(results: Sequence[FunctionAnalysis]) -> str:
    doc = {"functions": []}
    for r in results:
        behaviors = []
        if r.summary is not None:
            for vec in r.summary.behaviors:
                behaviors.append({
                    v: ("inf" if f == INF else value_char(f))
                    for v, f in zip(r.summary.rows, vec)
                    if f
                })
        doc["functions"].append({
            "name": r.name,
            "variables": list(r.variables),
            "choices": [
                {"index": i, "domain": c}
                for i, c in enumerate(r.registry.cardinalities)
            ],
            "matrix": [[_json_poly(p) for p in row] for row in r.matrix.entries],
            "verdict": r.verdict,
            "sample_assignment": list(r.sample) if r.sample is not None else None,
            "blame": [list(pair) for pair in r.blame],
            "behaviors": behaviors,
        })
    return json.dumps(doc, indent=2) + "\n"


def run(argv: Sequence[str] | None = None) -> int:
    if hasattr(sys.stdout, "reconfigure"):
        sys.stdout.reconfigure(errors="replace")
    args = list(sys.argv[1:] if argv is None else argv)
    if args and args[0] == "analyze":
        args = args[1:]
    parser = build_parser()
    try:
        opts = parser.parse_args(args)
    except SystemExit as e:
        return 0 if e.code == 0 else 2

    try:
        with open(opts.file, encoding="utf-8") as fh:
            source = fh.read()
    except OSError as e:
        print(f"mwpflow: cannot read {opts.file}: {e}", file=sys.stderr)
        return 2

    try:
        program = parse(source)
    except ParseError as e:
        print(f"{opts.file}:{e}", file=sys.stderr)
        return 2
    for w in program.warnings:
        print(f"{opts.file}:{w}", file=sys.stderr)

    if opts.dump_ast:
        print(render(program), end="")
        return 0

    if opts.check_inline:
        caller_name, callee_name = opts.check_inline
        try:
            report = check_call_theorem(
                program.function(caller_name), program.function(callee_name)
            )
        except (KeyError, ValueError) as e:
            print(f"mwpflow: {e}", file=sys.stderr)
            return 2
        print(report)
        return 0 if report.ok else 1

    analysis = analyze_program(program, fast=opts.fast)
    results = list(analysis)
    if opts.function is not None:
        results = [r for r in results if r.name == opts.function]
        if not results:
            print(f"mwpflow: no function named {opts.function}", file=sys.stderr)
            return 2

    if opts.eval_picks is not None:
        try:
            picks = tuple(
                int(x) for x in opts.eval_picks.split(",") if x.strip() != ""
            )
        except ValueError:
            print(f"mwpflow: bad assignment {opts.eval_picks!r}", file=sys.stderr)
            return 2
        out = []
        for r in results:
            try:
                flow = r.matrix.evaluate(picks)
            except ValueError as e:
                print(f"mwpflow: {r.name}: {e}", file=sys.stderr)
                return 2
            out.append(f"function {r.name} at [{','.join(map(str, picks))}]")
            out.append(f"  variables: {' '.join(r.variables)}")
            out.extend("  " + line for line in str(flow).splitlines())
        print("\n".join(out))
        return 1 if any(r.verdict == UNBOUNDED for r in results) else 0

    if opts.json:
        sys.stdout.write(emit_json(results))
    else:
        sys.stdout.write(render_report(results))
    return 1 if any(r.verdict == UNBOUNDED for r in results) else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
