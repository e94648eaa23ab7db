"""Command-line surface: validate, analyze, select, compile, tree, lookup, proto.

Machine output (JSON, CSV, or table bytes) goes to stdout or ``--out``;
human-readable notes go to stderr so pipelines stay clean.  Exit codes:
0 success, 1 validation failure, 2 I/O or parse error, 3 computation refusal
(caps or method), 4 artifact/model digest mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import (
    CapExceededError,
    DigestMismatchError,
    DomainError,
    FormatError,
    MethodError,
    ObservationError,
    UnknownEvidenceError,
)
from .exact import exact_ev_compute, exact_ev_subset, exhaustive_subset_search
from .gaussian import LOW_N_THRESHOLD, gaussian_ev_subset
from .model import (
    DiagnosisModel,
    UtilityTable,
    model_digest,
    model_from_json,
    validate_model,
)
from .niv import ComputePolicy, NivReport, TablePolicy, compare_policies, niv
from .profiles import (
    PRESETS,
    export_analysis,
    export_moments,
    loss_curve,
    profile_from_dict,
)
from .table import compile_table, greedy_select, read_table, table_lookup, write_table
from .tree import build_tree, export_tree, tree_from_json, tree_lookup, tree_niv

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2
EXIT_REFUSED = 3
EXIT_DIGEST = 4


def _note(message: str) -> None:
    print(message, file=sys.stderr)


def _emit_text(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _emit_json(document: object, out: str | None) -> None:
    _emit_text(json.dumps(document, indent=2, sort_keys=True) + "\n", out)


def _load_model(path: str) -> DiagnosisModel:
    return model_from_json(Path(path).read_text(encoding="utf-8"))


def _load_valid_model(path: str) -> DiagnosisModel:
    model = _load_model(path)
    violations = validate_model(model)
    if violations:
        _note(f"model {path} is invalid:")
        for violation in violations:
            _note(f"  [{violation.code}] {violation.field}: {violation.message}")
        raise _Invalid()
    return model


class _Invalid(Exception):
    """Internal: model failed validation; diagnostics already printed."""


def _load_observation(path: str) -> dict[str, bool]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"observation file is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise FormatError("observation must be a JSON object of booleans")
    for key, value in data.items():
        if not isinstance(value, bool):
            raise FormatError(f"observation[{key!r}] must be true or false")
    return data


def cmd_validate(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    violations = validate_model(model)
    _emit_json([v.to_dict() for v in violations], args.out)
    return EXIT_OK if not violations else EXIT_INVALID


def _warn_low_n(model: DiagnosisModel, method: str) -> None:
    if method == "gaussian" and len(model.evidence) < LOW_N_THRESHOLD:
        _note(
            f"note: the normal approximation is unreliable below {LOW_N_THRESHOLD} "
            "summed items; prefer --method exact at this size"
        )


def _compute_report(model: DiagnosisModel, method: str, enum_cap: int) -> NivReport:
    ids = [item.id for item in model.evidence]
    if method == "exact":
        ev = exact_ev_compute(model, cap=enum_cap).ev
    else:
        ev = gaussian_ev_subset(model, ids).ev
    return niv(model, ComputePolicy(len(ids)), ev, method=method)


def cmd_analyze(args: argparse.Namespace) -> int:
    model = _load_valid_model(args.model)
    _warn_low_n(model, args.method)
    compute_report = _compute_report(model, args.method, args.cap_enum)

    subset, _ = greedy_select(
        model,
        method=args.method,
        lookahead=args.lookahead,
        enum_cap=args.cap_enum,
        table_cap=args.cap_table,
    )
    if args.method == "exact":
        table_ev = exact_ev_subset(model, subset, cap=args.cap_enum).ev
    else:
        table_ev = gaussian_ev_subset(model, subset).ev
    table_report = niv(model, TablePolicy(subset), table_ev, method=args.method)

    tree_report = None
    if args.method == "exact":
        tree, _ = build_tree(model, lookahead=args.lookahead, cap=args.cap_tree)
        tree_report = tree_niv(model, tree)

    if tree_report is not None and tree_report.niv > table_report.niv:
        best_name, best_report = "tree", tree_report
    else:
        best_name, best_report = "table", table_report
    choice = compare_policies(model, best_report, compute_report)
    document = {
        "compute": compute_report.to_dict(),
        "compile_table": table_report.to_dict(),
        "compile_tree": tree_report.to_dict() if tree_report is not None else None,
        "best_compile": best_name,
        "decision": choice.decision,
        "margin": choice.margin,
    }
    _emit_json(document, args.out)
    _note(f"decision: {choice.decision} (margin {choice.margin:.6g})")
    return EXIT_OK


def cmd_select(args: argparse.Namespace) -> int:
    model = _load_valid_model(args.model)
    _warn_low_n(model, args.method)
    if args.exhaustive:
        subset, report = exhaustive_subset_search(
            model, cap=args.cap_exhaustive, eval_cap=args.cap_enum
        )
        _emit_json({"subset": list(subset), "report": report.to_dict()}, args.out)
        return EXIT_OK
    subset, trace = greedy_select(
        model,
        method=args.method,
        lookahead=args.lookahead,
        enum_cap=args.cap_enum,
        table_cap=args.cap_table,
    )
    document = {
        "subset": list(subset),
        "stopped_reason": trace.stopped_reason,
        "kept": trace.kept,
        "steps": [
            {"id": s.evidence_id, "niv_before": s.niv_before, "niv_after": s.niv_after}
            for s in trace.steps
        ],
    }
    _emit_json(document, args.out)
    return EXIT_OK


def cmd_compile(args: argparse.Namespace) -> int:
    model = _load_valid_model(args.model)
    if args.subset is not None:
        subset = [s for s in args.subset.split(",") if s]
    else:
        subset, _ = greedy_select(
            model,
            method=args.method,
            lookahead=args.lookahead,
            enum_cap=args.cap_enum,
            table_cap=args.cap_table,
        )
        _note(f"selected subset: {list(subset)}")
    table = compile_table(model, subset, cap=args.cap_table)
    Path(args.out).write_bytes(write_table(table))
    _note(f"wrote {table.entries}-entry table over {len(table.subset)} items to {args.out}")
    return EXIT_OK


def cmd_tree(args: argparse.Namespace) -> int:
    model = _load_valid_model(args.model)
    tree, trace = build_tree(model, lookahead=args.lookahead, cap=args.cap_tree)
    _emit_text(export_tree(tree, format=args.format), args.out)
    _note(
        f"built tree with {tree.node_count} nodes in {len(trace.steps)} expansions "
        f"(niv {trace.initial_niv:.6g} -> {trace.final_niv:.6g})"
    )
    return EXIT_OK


def cmd_lookup(args: argparse.Namespace) -> int:
    model = _load_valid_model(args.model)
    observation = _load_observation(args.obs)
    digest = model_digest(model)
    if args.table is not None:
        table = read_table(Path(args.table).read_bytes())
        if table.model_digest != digest:
            raise DigestMismatchError(
                f"table {args.table} was compiled from a different model"
            )
        action = table_lookup(table, observation)
        consulted = list(table.subset)
    else:
        tree = tree_from_json(Path(args.tree).read_text(encoding="utf-8"))
        if tree.model_digest != digest:
            raise DigestMismatchError(f"tree {args.tree} was built from a different model")
        action, consulted = tree_lookup(tree, observation)
    _emit_json({"action": action.value, "consulted": consulted}, args.out)
    return EXIT_OK


def _parse_utilities(text: str) -> UtilityTable:
    parts = text.split(",")
    if len(parts) != 4:
        raise FormatError("--utilities expects four comma-separated numbers")
    try:
        numbers = [float(p) for p in parts]
    except ValueError:
        raise FormatError(f"--utilities could not parse {text!r}") from None
    return UtilityTable(*numbers)


def cmd_proto(args: argparse.Namespace) -> int:
    profiles = []
    if args.profile:
        for name in args.profile:
            profiles.append(PRESETS[name])
    if args.profile_file:
        for path in args.profile_file:
            try:
                data = json.loads(Path(path).read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise FormatError(f"profile file {path} is not valid JSON: {exc}") from None
            profiles.append(profile_from_dict(data))
    if not profiles:
        profiles = [PRESETS["high"], PRESETS["moderate"], PRESETS["low"]]
    utilities = _parse_utilities(args.utilities)
    curves = [
        loss_curve(
            profile,
            args.p_h,
            utilities,
            method=args.method,
            normalization=args.normalization,
            enum_cap=args.cap_enum,
        )
        for profile in profiles
    ]
    _emit_text(export_analysis(curves), args.out)
    if args.moments_out is not None:
        Path(args.moments_out).write_text(export_moments(profiles), encoding="utf-8")
        _note(f"wrote moment table to {args.moments_out}")
    return EXIT_OK


def _add_model_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("model", help="path to the model JSON file")


def _add_common_flags(parser: argparse.ArgumentParser, *, method_default: str = "exact") -> None:
    parser.add_argument("--method", choices=["exact", "gaussian"], default=method_default)
    parser.add_argument("--lookahead", type=int, default=0,
                        help="tolerated run of non-improving hill-climb steps")
    parser.add_argument("--cap-enum", type=int, default=25,
                        help="largest subset the exact oracle will enumerate")
    parser.add_argument("--cap-table", type=int, default=25,
                        help="largest subset a table may be compiled over")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sact",
        description="Compile binary diagnosis models into situation-action tables and trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check model invariants; print violations as JSON")
    _add_model_argument(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", help="compare computing against the best found compilation")
    _add_model_argument(p)
    _add_common_flags(p)
    p.add_argument("--cap-tree", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("select", help="choose the evidence subset to compile")
    _add_model_argument(p)
    _add_common_flags(p)
    p.add_argument("--exhaustive", action="store_true",
                   help="search all subsets instead of hill-climbing")
    p.add_argument("--cap-exhaustive", type=int, default=15)
    p.add_argument("--out")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("compile", help="write a compiled lookup table (SACT binary)")
    _add_model_argument(p)
    _add_common_flags(p)
    p.add_argument("--subset", help="comma-separated evidence ids (default: greedy selection)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("tree", help="build a situation-action tree and export it")
    _add_model_argument(p)
    p.add_argument("--lookahead", type=int, default=0)
    p.add_argument("--cap-tree", type=int, default=20)
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("lookup", help="run one observation through a compiled artifact")
    _add_model_argument(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--table", help="path to a SACT table")
    group.add_argument("--tree", help="path to a JSON tree")
    p.add_argument("--obs", required=True, help="path to an observation JSON object")
    p.add_argument("--out")
    p.set_defaults(func=cmd_lookup)

    p = sub.add_parser("proto", help="export loss curves for prototypical weight profiles")
    p.add_argument("--profile", action="append", choices=sorted(PRESETS),
                   help="named preset (repeatable; default: all)")
    p.add_argument("--profile-file", action="append",
                   help="path to a profile JSON file (repeatable)")
    p.add_argument("--p-h", type=float, default=0.5)
    p.add_argument("--utilities", default="1,0,0,1",
                   help="u_h_d,u_h_nd,u_nh_d,u_nh_nd")
    p.add_argument("--method", choices=["exact", "gaussian"], default="gaussian")
    p.add_argument("--normalization",
                   choices=["relative-to-compute", "range-normalized"],
                   default="relative-to-compute")
    p.add_argument("--cap-enum", type=int, default=25)
    p.add_argument("--out")
    p.add_argument("--moments-out")
    p.set_defaults(func=cmd_proto)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Invalid:
        return EXIT_INVALID
    except FormatError as exc:
        _note(f"error: {exc}")
        return EXIT_IO
    except (OSError, json.JSONDecodeError) as exc:
        _note(f"error: {exc}")
        return EXIT_IO
    except (CapExceededError, MethodError) as exc:
        _note(f"refused: {exc}")
        return EXIT_REFUSED
    except DigestMismatchError as exc:
        _note(f"stale artifact: {exc}")
        return EXIT_DIGEST
    except (DomainError, UnknownEvidenceError, ObservationError) as exc:
        _note(f"invalid input: {exc}")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
