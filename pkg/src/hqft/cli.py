"""Command-line entry point.

Exit codes: 0 when every check passes, 1 when input was read and some check
failed, 2 when input is malformed (bad JSON, unknown ids, syntax or type
errors, missing blocks).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .evaluator import check_moves, evaluate
from .exactlin import ExactLinError, FieldSpec, GF, QQ
from .groupoid import Groupoid, GroupoidError
from .gvcat import (
    MODES, CategoryError, CrossedFrobData, available_modes, category_to_json, check_axioms,
    check_crossing, derive_delta_nu, derive_eta_coev, groupoid_algebra, load_blocks, complete,
)
from .onedim import DualizableRep, RepError, evaluate_1d, parse_1d, regular_representation, typecheck_1d
from .report import Report
from .surface import SurfaceError, parse, typecheck

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
EXTRA_CHECKS = ("groupoid", "crossing", "moves")

INPUT_ERRORS = (OSError, json.JSONDecodeError, GroupoidError, CategoryError, SurfaceError,
                RepError, ExactLinError)


class InputError(Exception):
    pass


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON: {e}") from e
    except OSError as e:
        raise InputError(f"{path}: {e.strerror or e}") from e


def _write_json(path: str, data) -> None:
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _split_paths(paths: list[str], what: str) -> tuple[Groupoid | None, dict]:
    """``[groupoid] file``; returns the optional groupoid and the parsed file."""
    if len(paths) not in (1, 2):
        raise InputError(f"expected [GROUPOID] {what}")
    g = Groupoid.from_json(_read_json(paths[0])) if len(paths) == 2 else None
    return g, _read_json(paths[-1])


def _groupoid(args, g):
    if getattr(args, "groupoid", None):
        return Groupoid.from_json(_read_json(args.groupoid))
    return g


def _load_category(args):
    g, data = _split_paths(args.paths, "CATEGORY")
    g = _groupoid(args, g)
    cat, phi = load_blocks(data, g)
    return cat, phi


def _emit(rep: Report, args) -> int:
    rep = rep.sorted()
    print(rep.format_summary())
    if args.report:
        _write_json(args.report, rep.to_json())
    return EXIT_OK if rep.passed else EXIT_FAIL


def _parse_checks(text: str | None) -> list[str] | None:
    if text is None:
        return None
    checks = [c.strip() for c in text.split(",") if c.strip()]
    bad = [c for c in checks if c not in MODES + EXTRA_CHECKS]
    if bad:
        raise InputError(f"unknown check(s): {', '.join(bad)}; choose from {', '.join(MODES + EXTRA_CHECKS)}")
    return checks


# -- commands -------------------------------------------------------------------

def cmd_verify(args) -> int:
    cat, phi = _load_category(args)
    checks = _parse_checks(args.checks)
    cfd = CrossedFrobData(complete(cat), phi) if phi is not None else None
    if checks is None:
        checks = ["groupoid"] + available_modes(cat) + (["crossing"] if cfd else [])
    rep = Report(meta={"seed": args.seed})
    if "groupoid" in checks:
        rep.extend(cat.groupoid.validate())
    modes = [c for c in checks if c in MODES]
    if modes:
        rep.extend(check_axioms(cat, modes))
    if "crossing" in checks or "moves" in checks:
        if cfd is None:
            raise CategoryError("crossing and move checks need a 'phi' block")
        if "crossing" in checks:
            rep.extend(check_crossing(cfd))
        if "moves" in checks:
            rep.extend(check_moves(cfd, args.seed, args.trials))
    return _emit(rep, args)


def cmd_moves(args) -> int:
    cat, phi = _load_category(args)
    if phi is None:
        raise CategoryError("move checks need a 'phi' block")
    rep = check_moves(CrossedFrobData(complete(cat), phi), args.seed, args.trials)
    return _emit(rep, args)


def _format_matrix(m) -> str:
    cells = [[str(m.field.format(x)) for x in row] for row in m.to_rows()]
    if not cells or not cells[0]:
        return f"({m.rows}x{m.cols} empty matrix)"
    w = max(len(c) for row in cells for c in row)
    return "\n".join("[ " + "  ".join(c.rjust(w) for c in row) + " ]" for row in cells)


def _print_result(ins, outs, mat, fmt) -> None:
    print(f"input:  [{', '.join(fmt(x) for x in ins)}]")
    print(f"output: [{', '.join(fmt(x) for x in outs)}]")
    print(f"matrix ({mat.rows}x{mat.cols}):")
    print(_format_matrix(mat))


def _expr_text(args) -> str:
    if args.expr is None:
        raise InputError("no expression given; use -e EXPR")
    return args.expr


def cmd_eval(args) -> int:
    if args.dim == 1:
        return cmd_eval1d(args)
    cat, phi = _load_category(args)
    if phi is None:
        raise CategoryError("evaluating surfaces needs a 'phi' block")
    cfd = CrossedFrobData(complete(cat), phi)
    e = parse(_expr_text(args), cfd.groupoid)
    ins, outs = typecheck(e, cfd.groupoid)
    _print_result(ins, outs, evaluate(e, cfd, check=False), lambda m: m.id)
    return EXIT_OK


def cmd_eval1d(args) -> int:
    g, data = _split_paths(args.paths, "REPRESENTATION")
    rep = DualizableRep.from_json(data, _groupoid(args, g))
    e = parse_1d(_expr_text(args), rep.groupoid)
    ins, outs = typecheck_1d(e, rep.groupoid)
    _print_result(ins, outs, evaluate_1d(e, rep, check=False),
                  lambda p: ("+" if p[1] > 0 else "-") + p[0])
    return EXIT_OK


def cmd_derive(args) -> int:
    g, data = _split_paths(args.paths, "CATEGORY")
    cat, phi = load_blocks(data, _groupoid(args, g))
    if args.direction == "eta":
        eta, coev = derive_eta_coev(cat)
        cat = replace(cat, eta=eta, coev=coev)
    else:
        delta, nu = derive_delta_nu(cat)
        cat = replace(cat, delta=delta, nu=nu)
    out = CrossedFrobData(complete(cat), phi) if phi is not None else cat
    data_out = category_to_json(out, embed_groupoid="groupoid" in data)
    if phi is not None:
        # keep only what the source had plus the derived pair
        keep = set(data) | ({"eta", "coev"} if args.direction == "eta" else {"delta", "nu"})
        data_out = {k: v for k, v in data_out.items() if k in keep or k in ("field", "grading", "dims")}
    _write_json(args.output, data_out)
    rep = check_axioms(cat, available_modes(cat))
    if isinstance(out, CrossedFrobData):
        rep.extend(check_crossing(out))
    print(rep.sorted().format_summary())
    return EXIT_OK if rep.passed else EXIT_FAIL


def _field(text: str) -> FieldSpec:
    if text in ("Q", "rationals"):
        return QQ
    if text.startswith("GF(") and text.endswith(")"):
        return GF(int(text[3:-1]))
    if text.isdigit():
        return GF(int(text))
    raise InputError(f"unknown field {text!r}; use rationals or GF(p)")


def cmd_example(args) -> int:
    g = Groupoid.from_json(_read_json(args.groupoid_path))
    rep = g.validate()
    if not rep.passed:
        print(rep.format_summary(), file=sys.stderr)
        raise InputError("groupoid fails validation")
    fld = _field(args.field)
    if args.kind == "groupoid-algebra":
        data = category_to_json(groupoid_algebra(g, fld), embed_groupoid=args.embed)
    else:
        data = regular_representation(g, fld).to_json(embed_groupoid=args.embed)
    _write_json(args.output, data)
    return EXIT_OK


def cmd_validate_groupoid(args) -> int:
    return _emit(Groupoid.from_json(_read_json(args.groupoid_path)).validate(), args)


# -- argument parsing -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hqft", description="Exact checks and evaluation for "
                                "groupoid-graded Frobenius structures and labelled surfaces.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, paths_help, report=True):
        sp.add_argument("paths", nargs="+", metavar="FILE", help=paths_help)
        sp.add_argument("--groupoid", metavar="PATH", help="groupoid JSON (overrides an embedded one)")
        if report:
            sp.add_argument("--report", metavar="PATH", help="write the JSON report here ('-' for stdout)")

    def sampling(sp):
        sp.add_argument("--seed", type=int, default=0, help="seed for sampled label tuples (default 0)")
        sp.add_argument("--trials", type=_positive, default=200,
                        help="label tuples sampled when a space is too large (default 200)")

    sp = sub.add_parser("verify", help="check axioms of a category file")
    common(sp, "[GROUPOID] CATEGORY")
    sp.add_argument("--checks", help=f"comma-separated subset of: {', '.join(MODES + EXTRA_CHECKS)}")
    sampling(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("moves", help="check surface move and gluing identities")
    common(sp, "[GROUPOID] CATEGORY")
    sampling(sp)
    sp.set_defaults(func=cmd_moves)

    sp = sub.add_parser("eval", help="evaluate a surface expression")
    common(sp, "[GROUPOID] CATEGORY (or REPRESENTATION with --dim 1)", report=False)
    sp.add_argument("-e", "--expr", help="expression text")
    sp.add_argument("--dim", type=int, choices=(1, 2), default=2)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("eval1d", help="evaluate a 1-cobordism expression on a representation")
    common(sp, "[GROUPOID] REPRESENTATION", report=False)
    sp.add_argument("-e", "--expr", help="expression text")
    sp.set_defaults(func=cmd_eval1d)

    sp = sub.add_parser("derive", help="derive (eta, coev) from (delta, nu) or the reverse")
    common(sp, "[GROUPOID] CATEGORY", report=False)
    sp.add_argument("--direction", choices=("eta", "delta"), required=True)
    sp.add_argument("-o", "--output", default="-", help="output path (default stdout)")
    sp.set_defaults(func=cmd_derive)

    sp = sub.add_parser("example", help="write an example structure for a groupoid")
    sp.add_argument("kind", choices=("groupoid-algebra", "regular-rep"))
    sp.add_argument("groupoid_path", metavar="GROUPOID")
    sp.add_argument("-o", "--output", default="-")
    sp.add_argument("--field", default="rationals", help="rationals or GF(p)")
    sp.add_argument("--no-embed", dest="embed", action="store_false",
                    help="do not copy the groupoid into the output")
    sp.set_defaults(func=cmd_example)

    sp = sub.add_parser("validate-groupoid", help="check groupoid axioms")
    sp.add_argument("groupoid_path", metavar="GROUPOID")
    sp.add_argument("--report", metavar="PATH")
    sp.set_defaults(func=cmd_validate_groupoid)
    return p


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, *INPUT_ERRORS) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
