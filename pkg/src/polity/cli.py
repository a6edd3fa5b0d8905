"""``polity`` command line.

Every analysis subcommand reads one matrix file and prints a JSON report on
stdout (or ``--out``); a short human summary goes to stderr. ``gen`` writes
a matrix file instead. Person indices on the command line and in reports
are 1-based.

Exit codes: 0 success, 1 invalid input or usage, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__, core
from .core import IndexPartition, validate
from .election import support_matrix
from .errors import NonPositiveEntry, NumericalError, PolityError, TooLarge, ValidationError
from .families import enumerate_families, is_connected, upper_class_families
from .io import digest, format_matrix, read_matrix
from .perturb import (
    consensus,
    decompose,
    dominated_power,
    inverse_expansion_error,
    limit_support,
    power_expansion_error,
    singular_inverse_expansion,
)
from .power import contraction_bound, power_explicit, power_iterative
from .simulate import simulate_joint, simulate_marginals
from .structures import (
    TreeSpec,
    gen_correlation_case,
    gen_equality,
    gen_family_tree,
    gen_father_and_sons,
    gen_garden,
    mix_uniform,
)

DEFAULT_TOL = 1e-10
DEFAULT_THRESHOLD = 1e-2
DEFAULT_TRIALS = 100_000
DEFAULT_MIX = 1e-3


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _indices(text: str | None):
    if text is None:
        return None
    try:
        out = [int(t) - 1 for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"bad index list {text!r}") from exc
    if any(i < 0 for i in out):
        raise UsageError(f"indices are 1-based, got {text!r}")
    return out


def _floats(text: str):
    try:
        return [float(t) for t in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad number list {text!r}") from exc


def _finite(obj):
    """Recursively convert numpy values and refuse NaN/inf."""
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _finite(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        if not math.isfinite(obj):
            return None
        return float(obj)
    return obj


def _load(args):
    raw = read_matrix(args.matrix, args.format)
    try:
        return validate(raw, "politics")
    except NonPositiveEntry:
        return validate(raw, "dominated")


def _partition(args, n):
    cands = _indices(args.candidates)
    if not cands:
        raise UsageError("--candidates is required")
    voters = _indices(getattr(args, "voters", None))
    if voters is None:
        return IndexPartition.elect(cands, n)
    return IndexPartition(voters, cands, n)


def cmd_power(args, diag):
    a = validate(read_matrix(args.matrix, args.format), "politics")
    it = power_iterative(a, args.tol)
    ex = power_explicit(a)
    gap = float(np.abs(it.weights - ex.weights).max())
    if gap > 10 * args.tol:
        diag.append(f"iterative and explicit power differ by {gap:.3e}")
    bound = contraction_bound(a)
    return {
        "omega": ex.weights,
        "omega_iterative": it.weights,
        "iterations": it.iterations,
        "max_difference": gap,
        "agree": gap <= 10 * args.tol,
        "contraction": {"eps_min": bound.eps_min, "factor": bound.factor},
    }


def cmd_elect(args, diag):
    a = _load(args)
    part = _partition(args, a.n)
    d = support_matrix(a, part)
    if d.near_singular:
        diag.append(f"voter block is near-singular (condition {d.condition:.3e})")
    out = d.to_json()
    out["row_sums"] = np.asarray(d.entries).sum(axis=1)
    return out


def _decomposition(a, threshold):
    dec = decompose(a, threshold)
    return dec, {
        "threshold": threshold,
        "scale": dec.scale,
        "dominated": np.asarray(dec.dominated),
        "correction": dec.correction,
        "reconstruction_error": float(np.abs(dec.reconstruct() - np.asarray(a)).max()),
    }


def cmd_families(args, diag):
    a = _load(args)
    dec, summary = _decomposition(a, args.threshold)
    a_hat = dec.dominated
    connected = is_connected(a_hat)
    try:
        topo = enumerate_families(a_hat).to_json(connected)
    except TooLarge as exc:
        diag.append(str(exc))
        topo = {
            "families": None,
            "upper_class": [sorted(i + 1 for i in u) for u in upper_class_families(a_hat)],
            "connected": connected,
        }
    return {"decomposition": summary, **topo}


def cmd_perturb(args, diag):
    a = _load(args)
    part = _partition(args, a.n)
    dec, summary = _decomposition(a, args.threshold)
    a_hat, b = np.asarray(dec.dominated), dec.correction
    dp = dominated_power(a_hat, b)
    if dp.kernel_dim:
        diag.append(f"first-order correction chosen from a {dp.kernel_dim}-dimensional family")
    limit = limit_support(a_hat, b, part)
    voters = set(part.voters)
    cons = [consensus(a_hat, b, u, part).to_json() for u in dp.upper_class if u <= voters]

    table = []
    lhs = np.eye(len(part.voters)) - core.block(a_hat, part.voters, part.voters)
    n_mat = -core.block(b, part.voters, part.voters)
    exp = singular_inverse_expansion(lhs, n_mat) if core.is_singular(lhs) else None
    for eps in (dec.scale, dec.scale / 10, dec.scale / 100):
        row = {"eps": eps, "power_error": power_expansion_error(a_hat, b, dp, eps)}
        if exp is not None:
            row["inverse_error"] = inverse_expansion_error(lhs, n_mat, exp, eps)
        table.append(row)
    return {
        "decomposition": summary,
        "dominated_power": dp.to_json(),
        "limit_support": limit.to_json(),
        "consensus": cons,
        "residuals": table,
    }


def cmd_simulate(args, diag):
    a = _load(args)
    part = _partition(args, a.n)
    run = simulate_joint if args.mode == "joint" else simulate_marginals
    res = run(a, part, args.trials, args.seed, workers=args.workers)
    if res.unresolved:
        diag.append(f"{res.unresolved} delegation cycles were redrawn")
    out = res.to_json()
    out["mode"] = args.mode
    return out


def cmd_gen(args):
    kind = args.archetype
    if kind == "father-sons":
        leader = _floats(args.leader_row) if args.leader_row else None
        m = gen_father_and_sons(args.k, leader)
    elif kind == "tree":
        if not args.parents:
            raise UsageError("tree needs --parents")
        m = gen_family_tree(TreeSpec(tuple(_indices(args.parents))))
    elif kind == "equality":
        if args.s is None:
            raise UsageError("equality needs --s")
        m = gen_equality(args.k, args.s)
    elif kind == "case":
        m = gen_correlation_case(args.case, args.eps if args.eps is not None else 1e-4)
    elif kind == "garden":
        if not args.b or args.eps is None:
            raise UsageError("garden needs --b FILE and --eps")
        return gen_garden(read_matrix(args.b), args.eps)
    else:
        raise UsageError(f"unknown archetype {kind!r}")
    return mix_uniform(m, args.mix) if args.mix > 0 else m


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="polity", description="Influence matrices: power, elections, families.")
    p.add_argument("--version", action="version", version=f"polity {__version__}")
    p.add_argument("--rank-tol", type=float, default=core.RANK_TOL,
                   help="relative tolerance for rank and singularity decisions")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def analysis(name, help):
        s = sub.add_parser(name, help=help)
        s.add_argument("matrix")
        s.add_argument("--format", choices=("csv", "json"))
        s.add_argument("--out")
        return s

    s = analysis("power", "power vector by two methods")
    s.add_argument("--tol", type=float, default=DEFAULT_TOL)

    s = analysis("elect", "support matrix for a candidate set")
    s.add_argument("--candidates", required=True)
    s.add_argument("--voters")

    s = analysis("families", "dominated part, family topology, upper class")
    s.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)

    s = analysis("perturb", "limit power, limit support, consensus")
    s.add_argument("--candidates", required=True)
    s.add_argument("--voters")
    s.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)

    s = analysis("simulate", "Monte Carlo support frequencies")
    s.add_argument("--candidates", required=True)
    s.add_argument("--voters")
    s.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--mode", choices=("joint", "marginal"), default="joint")
    s.add_argument("--workers", type=int, default=1)

    g = sub.add_parser("gen", help="write an archetype matrix")
    g.add_argument("archetype", choices=("father-sons", "tree", "equality", "garden", "case"))
    g.add_argument("--k", type=int, default=3)
    g.add_argument("--leader-row")
    g.add_argument("--parents", help="1-based parent of each person, root is its own parent")
    g.add_argument("--s", type=float)
    g.add_argument("--b", help="matrix file holding B for the garden")
    g.add_argument("--eps", type=float)
    g.add_argument("--case", type=int, choices=(1, 2), default=1)
    g.add_argument("--mix", type=float, default=DEFAULT_MIX,
                   help="blend toward uniform so the output is strictly positive; 0 keeps zeros")
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--out")
    return p


COMMANDS = {
    "power": cmd_power,
    "elect": cmd_elect,
    "families": cmd_families,
    "perturb": cmd_perturb,
    "simulate": cmd_simulate,
}


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    saved_tol = core.RANK_TOL
    try:
        args = build_parser().parse_args(argv)
        core.RANK_TOL = args.rank_tol
        if args.command == "gen":
            m = cmd_gen(args)
            _emit(format_matrix(np.asarray(m), args.format), args.out)
            print(f"polity gen: wrote {np.asarray(m).shape[0]}x{np.asarray(m).shape[0]} "
                  f"{args.archetype} matrix", file=sys.stderr)
            return 0
        diag: list = []
        params = {k: v for k, v in sorted(vars(args).items())
                  if k not in ("matrix", "out", "command")}
        results = COMMANDS[args.command](args, diag)
        report = {
            "version": __version__,
            "command": args.command,
            "inputs": {"matrix": {"path": args.matrix, "sha256": digest(args.matrix)}},
            "parameters": params,
            "results": results,
            "diagnostics": diag,
        }
        _emit(json.dumps(_finite(report), indent=2, allow_nan=False) + "\n", args.out)
        print(f"polity {args.command}: ok" + (f" ({len(diag)} diagnostics)" if diag else ""),
              file=sys.stderr)
        return 0
    except (ValidationError, OSError) as exc:
        print(f"polity: error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, PolityError) as exc:
        print(f"polity: numerical failure: {exc}", file=sys.stderr)
        return 2
    finally:
        core.RANK_TOL = saved_tol


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
