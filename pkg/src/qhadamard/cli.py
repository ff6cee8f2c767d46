"""``qhadamard`` command-line interface.

Exit codes: 0 success, 1 verification failed or unclassified, 2 usage or
parse error.  Every command writes one JSON document to stdout.
"""

from __future__ import annotations

import argparse
import ast
import math
import operator
import sys

import numpy as np

from . import __version__
from .butson import bh45_emptiness, butson_profile
from .documents import ParseError, emit, emit_matrix, emit_report, parse_matrix
from .families import FamilyPoint, generate
from .qmat import (
    EquivalenceMove,
    QMatrix,
    apply_move,
    complex_adjoint,
    core_row,
    dephase,
    hadamard_check,
    is_circulant_core,
    is_dephased,
    lift_from_complex,
    lift_from_real,
    real_adjoint,
)
from .quat import DomainError, Quaternion
from .search import classify, residual_norm, solve_circulant

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# CLI family name -> (internal name, required params, optional params with defaults)
CLI_FAMILIES = {
    "fourier": ("fourier", ("n",), {"theta": 0.0, "phi": math.pi / 2}),
    "order3": ("order3", ("theta", "phi"), {}),
    "order4-generic": ("order4generic", ("theta", "phi", "gamma"), {}),
    "order5-sphere": ("order5sphere", ("t",), {}),
    "order5-oneparam": ("order5oneparam", ("a0",), {}),
    "order5-noncirc": ("order5noncirc", ("t",), {}),
}


class UsageError(Exception):
    pass


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}
_NAMES = {"pi": math.pi}
_FUNCS = {"sqrt": math.sqrt}


def _eval_node(node):
    if (
        isinstance(node, ast.Constant)
        and isinstance(node.value, (int, float))
        and not isinstance(node.value, bool)
    ):
        return node.value
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_node(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id in _FUNCS
        and len(node.args) == 1
        and not node.keywords
    ):
        return _FUNCS[node.func.id](_eval_node(node.args[0]))
    raise ValueError("unsupported expression")


def parse_number(text: str) -> float:
    """A float, or a small arithmetic expression in pi and sqrt such as ``pi/4``."""
    try:
        return float(text)
    except ValueError:
        pass
    try:
        v = _eval_node(ast.parse(text.strip(), mode="eval").body)
    except (SyntaxError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse number {text!r}: {exc}") from None
    v = float(v)
    if not math.isfinite(v):
        raise UsageError(f"non-finite number {text!r}")
    return v


def _split_param(item: str) -> tuple[str, str]:
    if "=" not in item:
        raise UsageError(f"--param expects k=v, got {item!r}")
    k, v = item.split("=", 1)
    return k.strip(), v.strip()


def _family_params(family: str, items, skip=()) -> dict:
    if family not in CLI_FAMILIES:
        raise UsageError(f"unknown family {family!r}; choose from {sorted(CLI_FAMILIES)}")
    _, required, optional = CLI_FAMILIES[family]
    allowed = set(required) | set(optional)
    params = dict(optional)
    for item in items or ():
        k, v = _split_param(item)
        if k not in allowed:
            raise UsageError(f"family {family} has no parameter {k!r}; expected {sorted(allowed)}")
        if k in skip:
            continue
        params[k] = parse_number(v)
    missing = [k for k in required if k not in params and k not in skip]
    if missing:
        raise UsageError(f"family {family} needs --param for {missing}")
    if "n" in params:
        n = params["n"]
        if n != int(n) or n < 1:
            raise UsageError("n must be a positive integer")
        params["n"] = int(n)
    return params


def _branches(args) -> dict:
    br = {}
    if getattr(args, "sign_a", None):
        br["s_a"] = args.sign_a
    if getattr(args, "sign_d", None):
        br["s_d"] = args.sign_d
    if getattr(args, "root", None):
        br["root_choice"] = args.root
    return br


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load(path: str) -> QMatrix:
    return parse_matrix(_read_text(path))


def _out(data: bytes) -> None:
    sys.stdout.buffer.write(data)
    sys.stdout.flush()


def _qjson(q: Quaternion | None):
    return None if q is None else [float(v) for v in q]


# --- commands ---------------------------------------------------------------


def cmd_gen(args) -> int:
    params = _family_params(args.family, args.param)
    internal = CLI_FAMILIES[args.family][0]
    branches = _branches(args)
    H = generate(FamilyPoint(internal, params, branches))
    meta = {"family": args.family, "params": params}
    if branches:
        meta["branches"] = branches
    _out(emit_matrix(H, meta))
    return EXIT_OK


def cmd_verify(args) -> int:
    rep = hadamard_check(_load(args.file), args.tol)
    _out(emit_report(rep))
    return EXIT_OK if rep.passed else EXIT_FAIL


def _parse_perm(text: str, n: int) -> list[int]:
    try:
        perm = [int(p) - 1 for p in text.split(",")]
    except ValueError:
        raise UsageError(f"permutation must be comma-separated 1-based indices, got {text!r}") from None
    if sorted(perm) != list(range(n)):
        raise UsageError(f"{text!r} is not a permutation of 1..{n}")
    return perm


def cmd_move(args) -> int:
    H = _load(args.file)
    meta = {}
    if args.dephase:
        out, _, _ = dephase(H)
        meta["move"] = "dephase"
    elif args.permute_rows:
        out = apply_move(H, EquivalenceMove.row_permutation(_parse_perm(args.permute_rows, H.order)))
        meta["move"] = "permute_rows"
    elif args.permute_cols:
        out = apply_move(H, EquivalenceMove.col_permutation(_parse_perm(args.permute_cols, H.order)))
        meta["move"] = "permute_cols"
    else:
        parts = args.conjugate.split(",")
        if len(parts) != 4:
            raise UsageError("--conjugate expects w,x,y,z")
        u = Quaternion(*(parse_number(p) for p in parts))
        if abs(u) == 0.0:
            raise UsageError("--conjugate needs a nonzero quaternion")
        u = u / abs(u)
        out = apply_move(H, EquivalenceMove.conjugation(u))
        meta["move"] = "conjugate"
        meta["u"] = _qjson(u)
    _out(emit_matrix(out, meta))
    return EXIT_OK


def cmd_adjoint(args) -> int:
    H = _load(args.file)
    if args.complex:
        M = complex_adjoint(H)
        data = np.stack([M.real, M.imag, np.zeros(M.shape), np.zeros(M.shape)], axis=-1)
        kind = "complex"
    else:
        M = real_adjoint(H)
        z = np.zeros(M.shape)
        data = np.stack([M, z, z, z], axis=-1)
        kind = "real"
    _out(emit_matrix(QMatrix(data), {"adjoint": kind, "source_order": H.order}))
    return EXIT_OK


def cmd_lift(args) -> int:
    M = _load(args.file)
    d = M.data
    if np.max(np.abs(d[..., 2:]), initial=0.0) > args.tol:
        raise DomainError("lift input must have zero j and k components")
    if args.complex:
        out = lift_from_complex(d[..., 0] + 1j * d[..., 1], args.tol)
        kind = "complex"
    else:
        if np.max(np.abs(d[..., 1]), initial=0.0) > args.tol:
            raise DomainError("real lift input must be real")
        out = lift_from_real(d[..., 0], args.tol)
        kind = "real"
    _out(emit_matrix(out, {"lifted_from": kind}))
    return EXIT_OK


def cmd_butson(args) -> int:
    if args.rmax < 1:
        raise UsageError("--rmax must be at least 1")
    p = butson_profile(_load(args.file), args.rmax, args.tol)
    _out(
        emit(
            {
                "minimal_r": p.minimal_r,
                "q_axis": _qjson(p.q_axis),
                "per_entry_order": p.per_entry_order,
                "diagnostics": p.diagnostics,
            }
        )
    )
    return EXIT_OK


def cmd_bh45(args) -> int:
    r = bh45_emptiness()
    _out(
        emit(
            {
                "candidates": r.candidates,
                "valid": len(r.valid_rows),
                "empty": r.empty,
                "explanation": r.explanation,
                "fifth_root_valid_rows": r.fifth_root_valid_rows,
                "h45_noncirculant_rows_valid": r.noncirculant_rows_valid,
            }
        )
    )
    return EXIT_OK


def _json_params(params: dict) -> dict:
    out = {}
    for k, v in params.items():
        if isinstance(v, (list, tuple)):
            out[k] = [int(x) if isinstance(x, (int, np.integer)) else float(x) for x in v]
        elif isinstance(v, (int, np.integer)):
            out[k] = int(v)
        else:
            out[k] = float(v)
    return out


def cmd_solve(args) -> int:
    if args.restarts < 1:
        raise UsageError("--restarts must be at least 1")
    res = solve_circulant(args.order, args.restarts, args.seed, workers=args.workers)
    sols = [
        {
            "restart": s.restart,
            "core": [_qjson(q) for q in s.core],
            "residual": float(s.residual),
            "label": s.label,
            "params": _json_params(s.params),
            "match_residual": float(s.match_residual),
        }
        for s in res
    ]
    _out(
        emit(
            {
                "order": res.order,
                "restarts": res.restarts,
                "seed": res.seed,
                "converged": res.converged,
                "dropped": res.dropped,
                "label_counts": dict(sorted(res.label_counts.items())),
                "solutions": sols,
            }
        )
    )
    return EXIT_FAIL if res.label_counts.get("unclassified", 0) else EXIT_OK


def cmd_classify(args) -> int:
    H = _load(args.file)
    if H.order not in (3, 4, 5):
        raise UsageError(f"classify handles orders 3 to 5, got {H.order}")
    if not is_dephased(H, args.tol) or not is_circulant_core(H, args.tol):
        raise UsageError("classify expects a dephased matrix with circulant core")
    core = core_row(H)
    res = residual_norm(H.order, core)
    try:
        c = classify(H.order, core)
    except DomainError as exc:
        _out(emit({"label": "unclassified", "residual": res, "error": str(exc)}))
        return EXIT_FAIL
    _out(
        emit(
            {
                "label": c.label,
                "params": _json_params(c.params),
                "conjugator": _qjson(c.conjugator),
                "match_residual": float(c.match_residual),
                "residual": res,
            }
        )
    )
    return EXIT_FAIL if c.label == "unclassified" else EXIT_OK


def _parse_range(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"scan range must be lo:hi:steps, got {text!r}")
    lo, hi = parse_number(parts[0]), parse_number(parts[1])
    try:
        steps = int(parts[2])
    except ValueError:
        raise UsageError(f"steps must be an integer, got {parts[2]!r}") from None
    if steps < 1:
        raise UsageError("steps must be at least 1")
    return np.linspace(lo, hi, steps)


def cmd_scan(args) -> int:
    ranged = [(k, v) for k, v in map(_split_param, args.param or ()) if ":" in v]
    if len(ranged) != 1:
        raise UsageError("scan needs exactly one --param k=lo:hi:steps")
    key, span = ranged[0]
    fixed = _family_params(args.family, args.param, skip={key})
    internal = CLI_FAMILIES[args.family][0]
    branches = _branches(args)
    rows = []
    all_ok = True
    for v in _parse_range(span):
        params = dict(fixed, **{key: float(v)})
        row = {key: float(v)}
        try:
            rep = hadamard_check(generate(FamilyPoint(internal, params, branches)), args.tol)
            row.update({"pass": rep.passed, "max_residual": rep.max_dev})
        except DomainError as exc:
            row.update({"pass": False, "max_residual": None, "error": str(exc)})
        all_ok &= row["pass"]
        rows.append(row)
    _out(
        emit(
            {
                "family": args.family,
                "parameter": key,
                "tolerance": args.tol,
                "points": rows,
                "all_pass": all_ok,
            }
        )
    )
    return EXIT_OK if all_ok else EXIT_FAIL


# --- parser -----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _add_branch_flags(p):
    p.add_argument("--sign-a", choices=["+", "-"], help="sign branch s_a (order5-sphere)")
    p.add_argument("--sign-d", choices=["+", "-"], help="sign branch s_d (order5-oneparam)")
    p.add_argument("--root", choices=["principal", "degenerate"], help="quadratic root (order5-oneparam)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qhadamard", description="Construct, verify and classify quaternionic Hadamard matrices.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a family member")
    p.add_argument("family", choices=sorted(CLI_FAMILIES))
    p.add_argument("--param", action="append", metavar="K=V", help="family parameter; accepts pi and sqrt")
    _add_branch_flags(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="check the Hadamard conditions")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("move", help="apply an equivalence move")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--dephase", action="store_true")
    g.add_argument("--permute-rows", metavar="SIGMA", help="1-based, new row i = old row SIGMA[i]")
    g.add_argument("--permute-cols", metavar="SIGMA", help="1-based, new column j = old column SIGMA[j]")
    g.add_argument("--conjugate", metavar="W,X,Y,Z", help="entrywise u h u^-1; u is normalized first")
    p.add_argument("file")
    p.set_defaults(func=cmd_move)

    p = sub.add_parser("adjoint", help="complex or real adjoint")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--complex", action="store_true")
    g.add_argument("--real", action="store_true")
    p.add_argument("file")
    p.set_defaults(func=cmd_adjoint)

    p = sub.add_parser("lift", help="lift a compliant complex or real Hadamard matrix")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--complex", action="store_true")
    g.add_argument("--real", action="store_true")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("file")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("butson", help="root-of-unity profile")
    p.add_argument("--rmax", type=int, default=24)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("file")
    p.set_defaults(func=cmd_butson)

    p = sub.add_parser("bh45", help="BH(4,5) emptiness report")
    p.set_defaults(func=cmd_bh45)

    p = sub.add_parser("solve", help="multi-start circulant-core solver")
    p.add_argument("--order", type=int, choices=[3, 4, 5], required=True)
    p.add_argument("--restarts", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("classify", help="label a dephased circulant-core matrix")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("file")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("scan", help="verify a family along a parameter range")
    p.add_argument("family", choices=sorted(CLI_FAMILIES))
    p.add_argument("--param", action="append", metavar="K=V", help="one K=LO:HI:STEPS, others fixed")
    p.add_argument("--tol", type=float, default=1e-9)
    _add_branch_flags(p)
    p.set_defaults(func=cmd_scan)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"qhadamard: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"qhadamard: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ValueError, KeyError) as exc:
        print(f"qhadamard: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
