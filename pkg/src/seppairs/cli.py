"""Command-line entry point.

Exit codes: 0 success, 2 unreadable or malformed input, 3 a precondition of
the requested computation failed, 4 an internal consistency check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .cstar_modules import (
    State,
    check_complement_localization,
    check_concordance_via_states,
    check_intersection_localization,
    is_concordant,
    load_module_description,
    localize,
    localize_submodule,
    matrix_unit_states,
)
from .errors import InternalInconsistency, PreconditionFailed, SepPairsError
from .examples import EXAMPLES, run_sweep
from .hilbert_core import (
    Tolerance,
    matrix_from_json,
    matrix_to_json,
    moore_penrose,
    operator_norm,
    orthonormalize,
)
from .idempotents import (
    DEFAULT_LAMBDAS,
    canonical_pair,
    check_sum_is_projection,
    make_idempotent,
    mp_linear_combination,
    range_stability_sweep,
)
from .local_angles import KINDS, OptimizerBudget, local_angle
from .subspace_pairs import check_sum_equivalences, is_separated

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_INTERNAL = 0, 2, 3, 4


class InputError(Exception):
    """Input file missing, not JSON, or not in the expected shape."""


@dataclass(frozen=True)
class RunConfig:
    tol: Tolerance
    seed: int = 0
    fmt: str = "json"


# ---------------------------------------------------------------- input


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
        return json.loads(text)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _load(fn, *args):
    """Run a parser and report any failure as malformed input."""
    try:
        return fn(*args)
    except (SepPairsError, KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(str(exc)) from exc


def load_pair(path: str, tol: Tolerance):
    """``{"H": matrix, "K": matrix}``; columns of each matrix generate the subspace."""
    obj = _read_json(path)

    def parse():
        return orthonormalize(matrix_from_json(obj["H"]), tol), orthonormalize(matrix_from_json(obj["K"]), tol)

    return _load(parse)


def load_idempotent_pair(path: str, tol: Tolerance):
    """Either ``{"pi1", "pi2"}`` matrices or a subspace pair turned into its canonical idempotents."""
    obj = _read_json(path)
    if isinstance(obj, dict) and "pi1" in obj:
        return _load(lambda: (matrix_from_json(obj["pi1"]), matrix_from_json(obj["pi2"])))
    h, k = load_pair(path, tol)
    pair = canonical_pair(h, k, tol)
    return pair.pi1.matrix, pair.pi2.matrix


def load_module(path: str, tol: Tolerance):
    obj = _read_json(path)
    return _load(load_module_description, obj, tol)


def _parse_lambdas(text: str | None):
    if text is None:
        return list(DEFAULT_LAMBDAS)
    try:
        vals = json.loads(text)
        return [complex(float(v[0]), float(v[1])) for v in vals]
    except (json.JSONDecodeError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"--lambdas expects a JSON list of [re, im] pairs: {exc}") from exc


def _parse_n_list(text: str):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"--n-list expects comma-separated integers: {exc}") from exc
    if not vals:
        raise InputError("--n-list is empty")
    return vals


def _pick(subs: dict, name: str):
    if name not in subs:
        raise InputError(f"no submodule named {name!r}; have {sorted(subs)}")
    return subs[name]


# ---------------------------------------------------------------- output


def _plain(x):
    """Convert numpy scalars and complex numbers into JSON-native values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        # + 0.0 turns -0.0 into 0.0
        return [float(x.real) + 0.0, float(x.imag) + 0.0]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    return x


def _flatten(obj, prefix: str = ""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def render(report: dict, fmt: str) -> str:
    report = _plain(report)
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    rows = sorted(_flatten(report))
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        for k, v in rows:
            w.writerow([k, json.dumps(v)])
        return buf.getvalue()
    return "".join(f"{k}: {json.dumps(v)}\n" for k, v in rows)


# ---------------------------------------------------------------- commands


def cmd_angles(args, cfg: RunConfig) -> dict:
    h, k = load_pair(args.pair, cfg.tol)
    return {"dim_h": h.dim, "dim_k": k.dim, "report": is_separated(h, k, cfg.tol).to_dict()}


def cmd_separated(args, cfg: RunConfig) -> dict:
    h, k = load_pair(args.pair, cfg.tol)
    rep = is_separated(h, k, cfg.tol)
    return {
        "report": rep.to_dict(),
        "equivalences": check_sum_equivalences(h.projection, k.projection, cfg.tol),
    }


def cmd_idempotents(args, cfg: RunConfig) -> dict:
    h, k = load_pair(args.pair, cfg.tol)
    pair = canonical_pair(h, k, cfg.tol)
    out = {"canonical_pair": pair.to_dict()}
    out["sum_check"] = check_sum_is_projection(pair.pi1.matrix, pair.pi2.matrix, cfg.tol)
    return out


def cmd_pinv(args, cfg: RunConfig) -> dict:
    pi1, pi2 = load_idempotent_pair(args.pair, cfg.tol)
    make_idempotent(pi1, cfg.tol)
    make_idempotent(pi2, cfg.tol)
    lambdas = [complex(v) for v in _parse_lambdas(args.lambdas)]
    rows = []
    for lam in lambdas:
        formula = mp_linear_combination(pi1, pi2, lam, cfg.tol)
        direct = moore_penrose(pi1 + lam * pi2, cfg.tol)
        ref = operator_norm(direct)
        err = operator_norm(formula - direct) / ref if ref else operator_norm(formula)
        row = {"lambda": lam, "relative_error": err}
        if args.matrices:
            row["pinv"] = matrix_to_json(formula)
        rows.append(row)
    nonzero = [lam for lam in lambdas if lam != 0]
    return {"formula": rows, "range_stability": range_stability_sweep(pi1, pi2, nonzero, cfg.tol)}


def _default_states(module, states):
    return states or [State.tracial(module.algebra)] + matrix_unit_states(module.algebra)


def cmd_localize(args, cfg: RunConfig) -> dict:
    module, subs, states = load_module(args.module, cfg.tol)
    states = _default_states(module, states)
    per_state = []
    for idx, f in enumerate(states):
        loc = localize(module, f, cfg.tol)
        dims = {name: localize_submodule(sub, loc, cfg.tol).dim for name, sub in sorted(subs.items())}
        per_state.append({"state": idx, "pure": f.is_pure(cfg.tol), "faithful": f.is_faithful(cfg.tol),
                          "dim_Ef": loc.dim, "dims": dims})
    complements = {name: check_complement_localization(sub, states, cfg.tol) for name, sub in sorted(subs.items())}
    return {"module_dim": module.dim, "states": per_state, "complements": complements}


def cmd_concordant(args, cfg: RunConfig) -> dict:
    module, subs, states = load_module(args.module, cfg.tol)
    h, k = _pick(subs, args.h), _pick(subs, args.k)
    states = _default_states(module, states)
    return {
        "concordant": is_concordant(h, k, cfg.tol),
        "via_states": check_concordance_via_states(h, k, states, cfg.tol),
        "intersection_localization": check_intersection_localization(h, k, states, cfg.tol),
    }


def _write_landscape(path: str, est) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["block", "chunk", "index", "value", "xi"])
        for block, chunk, j, val, xi in est.landscape:
            w.writerow([block, chunk, j, repr(float(val)),
                        json.dumps([[float(z.real), float(z.imag)] for z in xi])])


def cmd_alpha(args, cfg: RunConfig) -> dict:
    module, subs, _ = load_module(args.module, cfg.tol)
    h, k = _pick(subs, args.h), _pick(subs, args.k)
    budget = OptimizerBudget(grid=args.grid, refine_iters=args.refine_iters, seed=cfg.seed)
    est = local_angle(h, k, args.kind, budget, cfg.tol)
    if args.landscape:
        _write_landscape(args.landscape, est)
    return est.to_dict()


def cmd_example(args, cfg: RunConfig) -> dict:
    n_list = _parse_n_list(args.n_list)
    budget = OptimizerBudget(seed=cfg.seed)
    report = run_sweep(args.name, n_list, cfg.tol, budget)
    if args.out:
        out = Path(args.out)
        out.write_text(report.to_csv(), encoding="utf-8")
        out.with_suffix(".json").write_text(render(report.to_dict(), "json"), encoding="utf-8")
    return report.to_dict()


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    def add_globals(parser, defaults: bool):
        # subcommands accept the same flags; SUPPRESS keeps them from
        # overwriting values given before the subcommand name
        d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
        parser.add_argument("--tol-rank", type=float, default=d(1e-10), help="relative singular value cutoff")
        parser.add_argument("--tol-eq", type=float, default=d(1e-9), help="absolute matrix equality threshold")
        parser.add_argument("--seed", type=int, default=d(0), help="seed for quasi-random grids")
        parser.add_argument("--format", choices=("json", "csv", "text"), default=d("json"))

    p = argparse.ArgumentParser(prog="seppairs", description="Separated pairs of subspaces and submodules.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    add_globals(p, True)
    common = argparse.ArgumentParser(add_help=False)
    add_globals(common, False)
    sub = p.add_subparsers(dest="command", required=True)

    for name, fn, helptext in (
        ("angles", cmd_angles, "Dixmier and Friedrichs cosines of a subspace pair"),
        ("separated", cmd_separated, "separation verdict and range identities"),
        ("idempotents", cmd_idempotents, "canonical idempotents of a separated pair"),
    ):
        sp = sub.add_parser(name, help=helptext, parents=[common])
        sp.add_argument("pair", help='JSON file {"H": matrix, "K": matrix}')
        sp.set_defaults(func=fn)

    sp = sub.add_parser("pinv", help="Moore-Penrose formula for Π1 + λΠ2", parents=[common])
    sp.add_argument("pair", help='subspace pair file or {"pi1": matrix, "pi2": matrix}')
    sp.add_argument("--lambdas", help="JSON list of [re, im] pairs")
    sp.add_argument("--matrices", action="store_true", help="include the pseudoinverses")
    sp.set_defaults(func=cmd_pinv)

    sp = sub.add_parser("localize", help="localize every submodule at every state", parents=[common])
    sp.add_argument("module", help="module description JSON")
    sp.set_defaults(func=cmd_localize)

    for name, fn in (("concordant", cmd_concordant), ("alpha", cmd_alpha)):
        sp = sub.add_parser(name, help="concordance checks" if name == "concordant" else "local angle estimate",
                            parents=[common])
        sp.add_argument("module", help="module description JSON")
        sp.add_argument("--h", default="H", help="name of the first submodule")
        sp.add_argument("--k", default="K", help="name of the second submodule")
        sp.set_defaults(func=fn)
        if name == "alpha":
            sp.add_argument("--kind", choices=KINDS, default="friedrichs")
            sp.add_argument("--grid", type=int, default=32)
            sp.add_argument("--refine-iters", type=int, default=400)
            sp.add_argument("--landscape", help="write the coarse grid values to this CSV")

    sp = sub.add_parser("example", help="run one worked example over several sizes", parents=[common])
    sp.add_argument("name", choices=sorted(EXAMPLES))
    sp.add_argument("--n-list", default="10,20,40,80")
    sp.add_argument("--out", help="CSV path; a JSON mirror is written next to it")
    sp.set_defaults(func=cmd_example)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(tol=Tolerance(args.tol_rank, args.tol_eq), seed=args.seed, fmt=args.format)
    except PreconditionFailed as exc:
        parser.error(str(exc))
    try:
        report = args.func(args, cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PreconditionFailed as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except InternalInconsistency as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    sys.stdout.write(render(report, cfg.fmt))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
