"""Command-line front end: JSON seed files in, JSON reports out.

Subcommands: mutate, explore, laurent-check, picard, rank2.  All output is
canonical (sorted keys, stable ordering) so repeated runs are byte-identical.

Exit codes: 0 success; 2 invalid input or violated precondition; 3 resource
truncation; 4 Laurent-phenomenon violation (which would indicate a bug, not
new mathematics).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .errors import ClusterGeomError, LaurentViolation, ValidationError
from .explore import explore, root_node, verify_laurent_A, verify_laurent_X
from .intmat import Matrix
from .rank2 import (
    Rank2Data,
    build_seed,
    fg_failure_flag,
    invariance_check,
    non_fg_flag,
    symmetric_form,
)
from .seeds import (
    FixedData,
    Seed,
    is_coprime_seed,
    mutate_along,
    picard_invariants,
    totally_coprime_sufficient,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_TRUNCATED = 3
EXIT_LAURENT = 4


def _parse_entry(x):
    if isinstance(x, bool):
        raise ValidationError("boolean matrix entries are not allowed")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            if "/" in x:
                p, q = x.split("/")
                return Fraction(int(p), int(q))
            return int(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"bad matrix entry {x!r}: {exc}")
    raise ValidationError(f"matrix entries must be integers or 'p/q' strings, got {x!r}")


def _encode_entry(x):
    if isinstance(x, int):
        return x
    return f"{x.numerator}/{x.denominator}"


def _encode_matrix(m):
    return [[_encode_entry(x) for x in row] for row in m.data]


def load_rank2_block(block):
    if "w" not in block:
        raise ValidationError("rank-2 block needs a 'w' array")
    w = [tuple(v) for v in block["w"]]
    nu = tuple(block["nu"]) if "nu" in block else None
    return Rank2Data(tuple(w), nu)


def load_seed_file(path):
    """Parse a seed file; returns (Seed, Rank2Data or None)."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid JSON: {exc}")
    if not isinstance(doc, dict):
        raise ValidationError("seed file must be a JSON object")
    block = doc.get("rank2", doc if "w" in doc else None)
    if block is not None:
        data = load_rank2_block(block)
        return build_seed(data), data
    for key in ("rank", "skew"):
        if key not in doc:
            raise ValidationError(f"seed file is missing '{key}'")
    n = doc["rank"]
    skew = Matrix([[_parse_entry(x) for x in row] for row in doc["skew"]])
    d = tuple(doc.get("d", (1,) * n))
    frozen = frozenset(doc.get("frozen", ()))
    fixed = FixedData(n, skew, d, frozen)
    basis = (
        Matrix(doc["basis"]) if "basis" in doc else Matrix.identity(n)
    )
    return Seed(fixed, basis), None


def seed_to_json(seed):
    return {
        "rank": seed.n,
        "skew": _encode_matrix(seed.fixed.skew),
        "d": list(seed.fixed.d),
        "frozen": sorted(seed.fixed.frozen),
        "basis": _encode_matrix(seed.basis),
    }


def _emit(obj):
    sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _parse_int_list(text):
    if text is None or text.strip() == "":
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise ValidationError(f"expected a comma-separated integer list, got {text!r}")


def cmd_mutate(args):
    seed, _ = load_seed_file(args.file)
    path = _parse_int_list(args.path)
    mutated = mutate_along(seed, path)
    _emit({
        "seed": seed_to_json(mutated),
        "path": list(mutated.path),
        "epsilon": _encode_matrix(mutated.eps),
    })
    return EXIT_OK


def cmd_explore(args):
    seed, _ = load_seed_file(args.file)
    graph = explore(
        root_node(seed),
        args.depth,
        dedup=args.dedup,
        workers=args.workers,
        max_terms=args.max_terms,
    )
    _emit(graph.report())
    return EXIT_TRUNCATED if graph.truncated else EXIT_OK


def cmd_laurent_check(args):
    seed, _ = load_seed_file(args.file)
    q = _parse_int_list(args.q)
    if len(q) != seed.n:
        raise ValidationError(
            f"exponent vector has length {len(q)}, expected {seed.n}"
        )
    verify = verify_laurent_A if args.side == "A" else verify_laurent_X
    report = verify(seed, tuple(q), args.depth, max_terms=args.max_terms)
    _emit(report)
    return EXIT_OK if report["laurent_ok"] else EXIT_LAURENT


def cmd_picard(args):
    seed, _ = load_seed_file(args.file)
    factors = picard_invariants(seed)
    torsion_free = all(f == 0 for f in factors)
    _emit({
        "invariant_factors": list(factors),
        "torsion_free": torsion_free,
        "factoriality": "factorial" if torsion_free else "not_guaranteed",
    })
    return EXIT_OK


def cmd_rank2(args):
    seed, data = load_seed_file(args.file)
    if data is None:
        raise ValidationError(
            "rank2 analysis needs a file with a 'w'/'nu' block"
        )
    paths = []
    if args.mutations is not None:
        paths = [_parse_int_list(args.mutations)]
    out = {
        "epsilon": _encode_matrix(seed.eps),
        "is_coprime_seed": is_coprime_seed(seed),
        "totally_coprime_sufficient": totally_coprime_sufficient(seed),
    }
    weight_one = all(x == 1 for x in data.nu)
    nfg = non_fg_flag(data)
    out.update({
        "supported": nfg["supported"],
        "boundary_self_intersections": nfg["boundary_self_intersections"],
        "all_minus_two": nfg["all_minus_two"],
        "non_noetherian_principal": nfg["non_noetherian_principal"],
    })
    if weight_one:
        form = symmetric_form(data)
        fg = fg_failure_flag(data)
        out.update({
            "K_basis": [list(v) for v in form.basis],
            "gram": _encode_matrix(form.gram),
            "classification": fg["form_classification"],
            "inertia": fg["inertia"],
            "fg_conjecture_possible": fg["fg_conjecture_possible"],
        })
        checked = []
        ok = True
        for path in paths:
            ok = ok and invariance_check(data, tuple(path))
            checked.append(list(path))
        out["invariance_checked_paths"] = checked
        out["invariance_ok"] = ok if checked else None
    else:
        out.update({
            "K_basis": None,
            "gram": None,
            "classification": None,
            "inertia": None,
            "fg_conjecture_possible": None,
            "invariance_checked_paths": [],
            "invariance_ok": None,
            "note": nfg.get("note"),
        })
    _emit(out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cluster-geom",
        description=(
            "Exact computations with cluster-variety seeds: mutation, "
            "exchange-graph exploration, Laurent checks, Picard invariants, "
            "and the rank-2 kernel-pairing analysis.  Indices are 0-based."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mutate", help="mutate a seed along a path")
    p.add_argument("file")
    p.add_argument("--path", default="", help="comma-separated mutation indices")
    p.set_defaults(fn=cmd_mutate)

    p = sub.add_parser("explore", help="breadth-first exchange graph")
    p.add_argument("file")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--dedup", choices=("labeled", "unlabeled"), default="labeled")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-terms", type=int, default=None)
    p.set_defaults(fn=cmd_explore)

    p = sub.add_parser(
        "laurent-check", help="verify a monomial stays Laurent under mutation"
    )
    p.add_argument("file")
    p.add_argument("--side", choices=("A", "X"), required=True)
    p.add_argument("--q", required=True, help="comma-separated exponents")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--max-terms", type=int, default=None)
    p.set_defaults(fn=cmd_laurent_check)

    p = sub.add_parser("picard", help="invariant factors of the Picard group")
    p.add_argument("file")
    p.set_defaults(fn=cmd_picard)

    p = sub.add_parser("rank2", help="full rank-2 analysis of a w/nu file")
    p.add_argument("file")
    p.add_argument(
        "--mutations", default=None,
        help="comma-separated path for an invariance check",
    )
    p.set_defaults(fn=cmd_rank2)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except LaurentViolation as exc:
        print(f"laurent violation: {exc}", file=sys.stderr)
        return EXIT_LAURENT
    except ClusterGeomError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
