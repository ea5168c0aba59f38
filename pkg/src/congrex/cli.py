"""Command-line front end.

All subcommands emit deterministic JSON (sorted keys) by default; ``--format
text`` prints a short human-readable summary instead.  Exit codes: 0 decided
or computed, 1 error, 2 not-applicable, 3 budget refusal.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .algebra import FiniteAlgebra, budget_from_env, direct_product
from .analyzer import (
    decide_group,
    decide_product,
    group_witness_pipeline,
)
from .clones import (
    FiniteFunction,
    comp_fragment,
    pol_fragment,
    skew_congruences,
    tensor_fragments,
)
from .errors import BudgetExceededError, CongrexError
from .groups import parse_group_spec
from .lattice import (
    FiniteLattice,
    congruence_lattice,
    is_modular,
    splits,
    splits_strongly,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_APPLICABLE = 2
EXIT_BUDGET = 3


def load_algebra(token: str) -> FiniteAlgebra:
    """A group shortcut string, or a path to an algebra JSON file."""
    if os.path.exists(token):
        with open(token, "r", encoding="utf-8") as fh:
            return FiniteAlgebra.from_json(fh.read())
    return parse_group_spec(token)


def load_lattice(token: str):
    """(lattice, congruence list or None): a lattice JSON file, or Con of an
    algebra given by shortcut/JSON."""
    if os.path.exists(token):
        with open(token, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if "leq" in data:
            return FiniteLattice.from_json_dict(data), None
        alg = FiniteAlgebra.from_json_dict(data)
    else:
        alg = parse_group_spec(token)
    lat, congs = congruence_lattice(alg)
    return lat, congs


def emit(payload, fmt: str, text_lines=None) -> None:
    if fmt == "text" and text_lines is not None:
        for line in text_lines:
            print(line)
    else:
        print(json.dumps(payload, sort_keys=True, indent=2))


def cmd_con(args) -> int:
    alg = load_algebra(args.input)
    congs = alg.all_congruences(force=args.force, budget=args.budget)
    payload = {
        "algebra": alg.name,
        "size": alg.size,
        "count": len(congs),
        "congruences": [[list(b) for b in c.blocks()] for c in congs],
    }
    emit(
        payload,
        args.format,
        [f"{alg.name or 'algebra'}: {len(congs)} congruences"]
        + [str(c) for c in congs],
    )
    return EXIT_OK


def cmd_lattice(args) -> int:
    lat, _ = load_lattice(args.input)
    if args.check == "modular":
        result = is_modular(lat)
        emit({"check": "modular", "result": result}, args.format, [str(result)])
        return EXIT_OK
    w = splits_strongly(lat) if args.check == "splits-strongly" else splits(lat)
    payload = {
        "check": args.check,
        "witness": w.to_json_dict() if w else None,
        "size": lat.size,
    }
    emit(payload, args.format, [f"{args.check}: {w.to_json_dict() if w else None}"])
    return EXIT_OK


def cmd_decide(args) -> int:
    if len(args.inputs) == 1:
        report = decide_group(load_algebra(args.inputs[0]))
    else:
        factors = [load_algebra(t) for t in args.inputs]
        report = decide_product(
            factors, assume_nilpotent=args.assume_nilpotent_pp_factors
        )
    payload = report.to_json_dict()
    emit(payload, args.format, [f"verdict: {report.verdict} ({report.route})"])
    return report.exit_code


def cmd_witness(args) -> int:
    payload = group_witness_pipeline(
        load_algebra(args.input), up_to_n=args.up_to_n, k=args.k
    )
    emit(
        payload,
        args.format,
        [
            f"base {payload['base']}: a={payload['a']} b={payload['b']}",
            f"centrality: {payload['centrality']}",
            f"commutator witness arity: {payload['commutator_witness_arity']}",
        ],
    )
    return EXIT_OK


def cmd_clone(args) -> int:
    with open(args.input, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    size = data["universe_size"]
    gens = [
        FiniteFunction(size, f["arity"], tuple(f["table"]))
        for f in data.get("functions", [])
    ]
    from .clones import clone_closure

    frag = clone_closure(
        gens, args.max_arity, universe_size=size, member_cap=args.budget or 10**6
    )
    payload = frag.to_json_dict()
    emit(payload, args.format, [f"{frag.member_count()} members"])
    return EXIT_OK


def cmd_comp(args) -> int:
    alg = load_algebra(args.input)
    frag = comp_fragment(alg, args.max_arity, budget=args.budget or 10**7)
    payload = frag.to_json_dict()
    emit(payload, args.format, [f"{frag.member_count()} members"])
    return EXIT_OK


def cmd_pol(args) -> int:
    alg = load_algebra(args.input)
    frag = pol_fragment(alg, args.max_arity, member_cap=args.budget or 10**6)
    payload = frag.to_json_dict()
    emit(payload, args.format, [f"{frag.member_count()} members"])
    return EXIT_OK


def cmd_skew(args) -> int:
    left = load_algebra(args.left)
    right = load_algebra(args.right)
    prod = direct_product(left, right)
    congs = prod.all_congruences(force=args.force, budget=args.budget)
    skew = skew_congruences(prod, congs)
    payload = {
        "product": prod.name,
        "congruence_count": len(congs),
        "skew_count": len(skew),
        "skew_free": not skew,
        "skew_congruences": [[list(b) for b in c.blocks()] for c in skew],
    }
    emit(payload, args.format, [f"skew congruences: {len(skew)}"])
    return EXIT_OK


def cmd_tensor(args) -> int:
    left = load_algebra(args.left)
    right = load_algebra(args.right)
    frag_l = pol_fragment(left, args.max_arity)
    frag_r = pol_fragment(right, args.max_arity)
    tensored = tensor_fragments(frag_l, frag_r)
    prod = direct_product(left, right)
    frag_p = pol_fragment(prod, args.max_arity)
    equal = tensored.members == frag_p.members
    payload = {
        "left": left.name,
        "right": right.name,
        "max_arity": args.max_arity,
        "tensor_member_count": tensored.member_count(),
        "product_member_count": frag_p.member_count(),
        "equal": equal,
    }
    emit(payload, args.format, [f"tensor == pol(product): {equal}"])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="congrex",
        description=(
            "Decide whether finite nilpotent algebras have infinitely many "
            "polynomially inequivalent congruence preserving expansions."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=["json", "text"], default="json")
        p.add_argument("--budget", type=int, default=None)
        p.add_argument("--force", action="store_true")

    p = sub.add_parser("con", help="congruence lattice of an algebra")
    p.add_argument("input")
    common(p)
    p.set_defaults(func=cmd_con)

    p = sub.add_parser("lattice", help="splitting/modularity checks")
    p.add_argument("input", help="lattice JSON file, algebra JSON, or group spec")
    p.add_argument(
        "--check",
        choices=["splits", "splits-strongly", "modular"],
        default="splits-strongly",
    )
    common(p)
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("decide", help="expansion verdict for a group or product")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--assume-nilpotent-pp-factors", action="store_true")
    common(p)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("witness", help="build and verify the witness pipeline")
    p.add_argument("input")
    p.add_argument("--up-to-n", type=int, default=3)
    p.add_argument("--k", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("clone", help="closure of a generator file")
    p.add_argument("input")
    p.add_argument("--max-arity", type=int, default=2)
    common(p)
    p.set_defaults(func=cmd_clone)

    p = sub.add_parser("comp", help="congruence preserving functions")
    p.add_argument("input")
    p.add_argument("--max-arity", type=int, default=2)
    common(p)
    p.set_defaults(func=cmd_comp)

    p = sub.add_parser("pol", help="polynomial functions")
    p.add_argument("input")
    p.add_argument("--max-arity", type=int, default=2)
    common(p)
    p.set_defaults(func=cmd_pol)

    p = sub.add_parser("skew", help="skew congruences of a binary product")
    p.add_argument("left")
    p.add_argument("right")
    common(p)
    p.set_defaults(func=cmd_skew)

    p = sub.add_parser("tensor", help="compare tensor of Pol fragments with Pol of product")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--max-arity", type=int, default=2)
    common(p)
    p.set_defaults(func=cmd_tensor)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "budget", None) is None:
        args.budget = (
            budget_from_env(None) if os.environ.get("CONGREX_BUDGET") else None
        )
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except CongrexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
