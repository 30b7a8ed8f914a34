"""Command-line surface: group verification, transfers, poles, exponents.

One binary with subcommands.  Every command builds a JSON payload first
and derives any text rendering from it, so the two formats cannot drift.
Exit codes are a stable contract: 0 success, 1 a named constraint of the
calculus fails on valid input, 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .isobaric import (
    ConstituentsNotDistinct,
    NotUnitaryNormalized,
    jiang_case_analysis,
    load_document,
    transfer,
    transfer_conditions,
)
from .lseries import (
    EstimationError,
    InsufficientLocalData,
    LocalPole,
    estimate_with_sweep,
    place,
    primes_up_to,
    sample_sato_tate,
)
from .satake import (
    CentralCharMismatch,
    GL2Param,
    GL4Param,
    PlaceData,
    exponents,
    gsp4_to_gl4_embed,
    match_multisets,
    param_from_json,
    param_to_json,
    rodier_class,
    theta_lift_params,
    transfer_gsp4_to_gl4,
)
from .simgroups import SUPPORTED_Q, UnsupportedField, verify_gso_presentation

EXIT_OK = 0
EXIT_CONSTRAINT = 1
EXIT_USAGE = 2

CONSTRAINT_CENTRAL_CHAR = "central_char_compatibility"
CONSTRAINT_DISTINCT = "distinct_constituents"
CONSTRAINT_UNITARY = "unitary_normalization"
CONSTRAINT_GROUPS = "pair_map_presentation"


def _emit(payload: dict, fmt: str, out: str | None, render_text, render_csv=None) -> None:
    if fmt == "json":
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        if render_csv is None:
            raise ValueError("csv format is not available for this command")
        text = render_csv(payload)
    else:
        text = render_text(payload)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# verify-groups
# ---------------------------------------------------------------------------


def _text_verify_groups(payload: dict) -> str:
    lines = [f"similitude group check over F_{payload['q']}"]
    for name, passed in payload["checks"].items():
        lines.append(f"  {name}: {'ok' if passed else 'FAIL'}")
    lines.append(
        f"  kernel {payload['kernel_size']} (expected {payload['kernel_expected']}), "
        f"image {payload['image_size']} (expected {payload['image_expected']}), "
        f"gso {payload['gso_size']}, go {payload['go_size']}"
    )
    lines.append("all assertions hold" if payload["ok"] else f"constraint failed: {CONSTRAINT_GROUPS}")
    return "\n".join(lines) + "\n"


def _cmd_verify_groups(args) -> int:
    try:
        report = verify_gso_presentation(args.q)
    except UnsupportedField as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    payload = report.to_json()
    _emit(payload, args.format, args.out, _text_verify_groups)
    return EXIT_OK if report.ok else EXIT_CONSTRAINT


# ---------------------------------------------------------------------------
# transfer
# ---------------------------------------------------------------------------


def _chain_at_place(desc, pl: PlaceData) -> dict:
    """The full parameter chain at one sampled place, plus consistency check.

    Degree-2 pair -> equal-central-value GL(2) data -> lifted degree-4
    parameter -> embedded multiset, compared against the direct torus-data
    transfer in the matched coordinates.
    """
    p1, p2 = desc.pair
    a1, b1 = p1.local_params[pl]
    a2, b2 = p2.local_params[pl]
    g1 = GL2Param.make(a1, b1)
    g2 = GL2Param.make(a2, b2)
    lifted = theta_lift_params(g1, g2)
    embedded = gsp4_to_gl4_embed(lifted)
    direct = transfer_gsp4_to_gl4(lifted.mu, g1.alpha, g2.alpha)
    commutes = match_multisets(embedded.entries, direct.entries)
    return {
        "q": pl.q,
        "gl2": [param_to_json(g1), param_to_json(g2)],
        "gsp4": param_to_json(lifted),
        "gl4": param_to_json(embedded),
        "commutes": bool(commutes),
    }


def _text_transfer(payload: dict) -> str:
    lines = ["transfer chain"]
    if payload["from_gso"] is not None:
        lines.append(f"  lifted from degree-2 pair: {payload['from_gso']}")
    if payload["isobaric"]:
        lines.append(f"  isobaric transfer: {' + '.join(payload['isobaric'])}")
    for cond in payload["conditions"]:
        lines.append(f"  recorded: {cond}")
    for entry in payload["places"]:
        lines.append(
            f"  q={entry['q']}: gl2 x gl2 -> gsp4 -> gl4, "
            f"diagram {'commutes' if entry['commutes'] else 'FAILS'}"
        )
    if payload["violation"]:
        lines.append(f"constraint failed: {payload['violation']}")
    else:
        lines.append("consistency OK")
    return "\n".join(lines) + "\n"


def _cmd_transfer(args) -> int:
    try:
        with open(args.infile) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read descriptor file: {exc}", file=sys.stderr)
        return EXIT_USAGE
    payload = {"from_gso": None, "isobaric": [], "conditions": [], "places": [], "violation": None}
    try:
        registry, descriptors = load_document(doc)
        if len(descriptors) != 1:
            print("error: transfer expects exactly one descriptor", file=sys.stderr)
            return EXIT_USAGE
        desc = descriptors[0]
    except CentralCharMismatch:
        payload["violation"] = CONSTRAINT_CENTRAL_CHAR
        _emit(payload, args.format, args.out, _text_transfer)
        return EXIT_CONSTRAINT
    except ConstituentsNotDistinct:
        payload["violation"] = CONSTRAINT_DISTINCT
        _emit(payload, args.format, args.out, _text_transfer)
        return EXIT_CONSTRAINT
    except NotUnitaryNormalized:
        payload["violation"] = CONSTRAINT_UNITARY
        _emit(payload, args.format, args.out, _text_transfer)
        return EXIT_CONSTRAINT
    except (KeyError, ValueError) as exc:
        print(f"error: malformed document: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rep = transfer(desc)
    payload["from_gso"] = desc.from_gso
    payload["isobaric"] = [sym.id for sym in rep.constituents]
    payload["conditions"] = list(transfer_conditions(desc))
    if desc.from_gso:
        common = set.intersection(
            *(set(sym.local_params) for sym in desc.pair)
        )
        try:
            for pl in sorted(common, key=lambda p: p.q):
                payload["places"].append(_chain_at_place(desc, pl))
        except CentralCharMismatch:
            # sampled local data of the pair has unequal central values
            payload["violation"] = CONSTRAINT_CENTRAL_CHAR
            _emit(payload, args.format, args.out, _text_transfer)
            return EXIT_CONSTRAINT
    ok = all(entry["commutes"] for entry in payload["places"])
    if not ok:
        payload["violation"] = "commuting_diagram"
    _emit(payload, args.format, args.out, _text_transfer)
    return EXIT_OK if ok else EXIT_CONSTRAINT


# ---------------------------------------------------------------------------
# poles
# ---------------------------------------------------------------------------


def _text_poles(payload: dict) -> str:
    lines = [f"case ({payload['case']})", f"symbolic pole order at s=1: {payload['symbolic_order']}"]
    for i, j in payload["witnesses"]:
        lines.append(f"  witness: constituent {i} of the first pairs with constituent {j} of the second")
    if payload.get("estimate") is not None:
        lines.append(
            f"numeric estimate: {payload['estimate']:.4f} "
            f"(X={payload['X']}, seed={payload['seed']})"
        )
    return "\n".join(lines) + "\n"


def _csv_poles(payload: dict) -> str:
    rows = ["s,re,im"]
    for s, (re, im) in zip(payload["sweep"]["s"], payload["sweep"]["values"]):
        rows.append(f"{s!r},{re!r},{im!r}")
    return "\n".join(rows) + "\n"


def _stream_seed(seed: int, key: str) -> int:
    h = 1469598103934665603
    for ch in key:
        h = (h ^ ord(ch)) * 1099511628211 % (2**63)
    return (seed * 1_000_003 + h) % (2**63)


def _synthesize_registry(descriptors, seed: int, X: int):
    """Shadow registry with synthetic angle data for every degree-2 symbol.

    The identification pattern of the document is preserved: each dual pair
    of symbol ids shares one stream seeded by (seed, smaller id), the dual
    side receives the entrywise inverses, and self-dual symbols get plain
    inverse-closed angle data.  Non-self-dual symbols additionally carry a
    place-varying unimodular central twist, so that a symbol is locally
    equivalent to its dual only when it is declared self-dual.
    """
    from .isobaric import SymbolRegistry, inverse_char_id, isobaric

    primes = primes_up_to(X)
    shadow = SymbolRegistry()
    for desc in descriptors:
        if not desc.from_gso:
            raise ValueError("numeric estimates need degree-2 constituents")
        for sym in desc.pair:
            if sym.id in shadow:
                continue
            base_id = min(sym.id, sym.dual_id)
            # angle and twist streams must be independent
            rng = np.random.Generator(np.random.PCG64(_stream_seed(seed, base_id + ":twist")))
            data = sample_sato_tate(_stream_seed(seed, base_id + ":angles"), primes)
            if sym.is_self_dual:
                local = {place(p): params for p, params in data.items()}
                shadow.create(sym.id, 2, central_char=sym.central_char_id,
                              self_dual=True, local=local)
                continue
            phases = np.exp(2j * math.pi * rng.random(len(primes)))
            local = {
                place(p): (z * a, z * b)
                for (p, (a, b)), z in zip(data.items(), phases)
            }
            if sym.id == base_id:
                shadow.create(sym.id, 2, central_char=sym.central_char_id,
                              dual_id=sym.dual_id, local=local)
            else:
                shadow.create(sym.dual_id, 2,
                              central_char=inverse_char_id(sym.central_char_id),
                              dual_id=sym.id, local=local)
    return [isobaric([shadow.get(s.id) for s in desc.pair]) for desc in descriptors]


def _cmd_poles(args) -> int:
    try:
        with open(args.infile) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read descriptor file: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        _, descriptors = load_document(doc)
    except CentralCharMismatch:
        print(f"constraint failed: {CONSTRAINT_CENTRAL_CHAR}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except ConstituentsNotDistinct:
        print(f"constraint failed: {CONSTRAINT_DISTINCT}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except NotUnitaryNormalized:
        print(f"constraint failed: {CONSTRAINT_UNITARY}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except (KeyError, ValueError) as exc:
        print(f"error: malformed document: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if len(descriptors) != 2:
        print("error: poles expects a document with two descriptors", file=sys.stderr)
        return EXIT_USAGE
    try:
        analysis = jiang_case_analysis(descriptors[0], descriptors[1])
    except (CentralCharMismatch, ConstituentsNotDistinct, NotUnitaryNormalized) as exc:
        print(f"constraint failed: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    payload = {
        "case": analysis.label,
        "symbolic_order": analysis.report.order,
        "witnesses": [list(w) for w in analysis.report.witnesses],
        "estimate": None,
        "X": args.X,
        "seed": args.seed,
        "sweep": {"s": [], "values": []},
    }
    if args.format == "csv" and args.mode == "symbolic":
        print("error: csv output needs --mode numeric or both", file=sys.stderr)
        return EXIT_USAGE
    if args.mode in ("numeric", "both"):
        try:
            reps = _synthesize_registry(descriptors, args.seed, args.X)
            est, sweep = estimate_with_sweep(reps[0], reps[1], args.X)
        except (LocalPole, EstimationError, InsufficientLocalData, ValueError) as exc:
            print(f"error: numeric estimate failed: {exc}", file=sys.stderr)
            return EXIT_USAGE
        payload["estimate"] = est
        payload["sweep"] = {
            "s": list(sweep.s_grid),
            "values": [[v.real, v.imag] for v in sweep.values],
        }
    _emit(payload, args.format, args.out, _text_poles, _csv_poles)
    return EXIT_OK


# ---------------------------------------------------------------------------
# rodier
# ---------------------------------------------------------------------------


def _text_rodier(payload: dict) -> str:
    lines = [
        "exponent vector: (" + ", ".join(str(e) for e in payload["exponents"]) + ")",
    ]
    v = payload["verdict"]
    if v["family"] == "not_in_list":
        lines.append("verdict: not in the exponent list (forces full induced)")
    elif v["family"] == "A":
        lines.append(f"verdict: family A with r = {v['r']}")
    else:
        lines.append(f"verdict: family {v['family']}")
    return "\n".join(lines) + "\n"


def _cmd_rodier(args) -> int:
    try:
        with open(args.params) as fh:
            doc = json.load(fh)
        param = param_from_json(doc)
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: cannot read parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not isinstance(param, GL4Param):
        print("error: expected a gl4 parameter document", file=sys.stderr)
        return EXIT_USAGE
    try:
        pl = PlaceData(args.q)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    vec = exponents(param, pl)
    verdict = rodier_class(vec)
    payload = {
        "q": args.q,
        "exponents": [str(e) for e in vec.e],
        "verdict": {
            "family": verdict.family,
            "r": None if verdict.r is None else str(verdict.r),
        },
    }
    _emit(payload, args.format, args.out, _text_rodier)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gsp4transfer",
        description="transfer calculus tools: group checks, lifts, pole orders",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="write output to this path")
    common.add_argument(
        "--format", choices=("text", "json", "csv"), default="text", help="output format"
    )

    p = sub.add_parser("verify-groups", parents=[common],
                       help="exhaustive check of the degree-4 similitude presentation")
    p.add_argument("--q", type=int, required=True, help=f"odd prime in {SUPPORTED_Q}")
    p.set_defaults(func=_cmd_verify_groups)

    p = sub.add_parser("transfer", parents=[common],
                       help="run the full lifting chain from a descriptor file")
    p.add_argument("--in", dest="infile", required=True, help="descriptor JSON file")
    p.set_defaults(func=_cmd_transfer)

    p = sub.add_parser("poles", parents=[common],
                       help="symbolic and numeric pole order for a descriptor pair")
    p.add_argument("--in", dest="infile", required=True, help="descriptor JSON file")
    p.add_argument("--mode", choices=("symbolic", "numeric", "both"), default="symbolic")
    p.add_argument("--X", type=int, default=100_000, help="truncation bound on places")
    p.add_argument("--seed", type=int, default=0, help="seed for synthetic data")
    p.set_defaults(func=_cmd_poles)

    p = sub.add_parser("rodier", parents=[common],
                       help="exponent-pattern classification of a gl4 parameter")
    p.add_argument("--params", required=True, help="gl4 parameter JSON file")
    p.add_argument("--q", type=int, required=True, help="residue cardinality")
    p.set_defaults(func=_cmd_rodier)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors already
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
