"""Command-line driver: parameter reports, encode/corrupt/decode on files,
seeded roundtrip experiments, radius tables, the brute-force oracle and
pre-code construction.

Exit codes: 0 ok, 1 runtime error, 2 invalid parameters."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import io as fio
from .channel import add_rank_errors, make_rng, rank_error_matrix, spawn_rngs
from .code import (
    CodeParams,
    crossover_rate,
    derive_parameters,
    encode,
    from_fq_matrix,
    random_message,
    rate_limit,
    tau_folded,
    unique_radius_fraction,
    word_add,
)
from .decoder import decode, interpolation_counts
from .errors import InvalidParameters, RankDecError
from .oracle import OracleBudget, brute_force_list, brute_force_min_distance
from .pruning import build_design, precode_design_build, precode_hse_build


def _frac_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _v_arg(text: str):
    if text == "auto":
        return text
    try:
        return int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer or 'auto', got {text!r}") from exc


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    return str(x)


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _params(args) -> CodeParams:
    if args.params:
        params = fio.load_params(fio.read_text(args.params))
    else:
        missing = [k for k in ("r", "n", "m", "k") if getattr(args, k) is None]
        if missing:
            raise InvalidParameters("missing parameters: " + ", ".join("--" + k for k in missing))
        params = CodeParams(args.r, args.ell, args.n, args.m, args.k, args.s)
    params.tower()  # validates r and the gcd condition
    return params


def _config_line(cmd: str, params: CodeParams | None = None, **extra) -> str:
    parts = [f"rankdec {cmd}", f"version={__version__}"]
    if params is not None:
        parts += [f"{k}={getattr(params, k)}" for k in fio.PARAM_KEYS]
    parts += [f"{k}={_fmt(v)}" for k, v in extra.items()]
    return "# " + " ".join(parts) + "\n"


# -- subcommands ---------------------------------------------------------------------

def tau_formula(params: CodeParams) -> str | None:
    """Closed form of the radius as a function of R when s = r-1."""
    if params.s != params.r - 1:
        return None
    c = params.r - params.k
    slope = Fraction(params.r - 1, params.r - c)
    return f"({Fraction(c, c + 1)})(1-{'' if slope == 1 else slope}R)"


def cmd_params(args) -> int:
    params = _params(args)
    d = derive_parameters(params)
    unknowns, constraints = interpolation_counts(params, max(d.e_max, 0))
    report = {
        "rate": d.rate,
        "distance_bound": d.distance_bound,
        "e_max": d.e_max,
        "tau": d.tau,
        "unique_radius": d.unique_radius,
        "mrd": d.mrd,
        "rho": d.rho,
        "rate_limit": d.rate_limit,
        "tau_asymptotic": d.tau_asymptotic,
        "interp_unknowns": unknowns,
        "interp_constraints": constraints,
    }
    formula = tau_formula(params)
    if formula:
        report["tau_formula"] = formula
    text = _config_line("params", params) + fio.dump_params(params, {k: _fmt(v) for k, v in report.items()})
    _emit(text, args.out)
    return 0


def cmd_encode(args) -> int:
    params = _params(args)
    tower = params.tower()
    if args.msg:
        f = fio.load_message(fio.read_text(args.msg), params)
    else:
        f = random_message(params, make_rng(args.seed))
        if args.msg_out:
            Path(args.msg_out).write_text(fio.dump_message(f))
    _emit(fio.dump_matrix(tower, encode(params, f, tower)), args.out)
    return 0


def cmd_corrupt(args) -> int:
    params = _params(args)
    tower = params.tower()
    M = fio.load_matrix(fio.read_text(args.matrix), tower)
    rng = make_rng(args.seed)
    E = from_fq_matrix(tower, rank_error_matrix(tower, args.e, rng))
    Y = word_add(tower, M, E)
    if args.error_out:
        Path(args.error_out).write_text(fio.dump_matrix(tower, E))
    _emit(fio.dump_matrix(tower, Y), args.out)
    return 0


def _load_precode(args, params):
    if not getattr(args, "precode", None):
        return None
    pc = fio.load_precode(fio.read_text(args.precode))
    if pc.params != params:
        raise InvalidParameters("pre-code was built for different code parameters")
    return pc


def cmd_decode(args) -> int:
    params = _params(args)
    tower = params.tower()
    Y = fio.load_matrix(fio.read_text(args.matrix), tower)
    pc = _load_precode(args, params)
    res = decode(Y, args.e, params, tower, precode=pc, max_list=args.max_list)
    stats = fio.dump_stats(res.stats)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "stats.txt").write_text(stats)
        for i, f in enumerate(res.messages):
            (out / f"msg_{i:03d}.txt").write_text(fio.dump_message(f))
        for i, x in enumerate(res.premessages or []):
            (out / f"pre_{i:03d}.txt").write_text(fio.dump_pre_message(x))
    else:
        sys.stdout.write(stats)
        for f in res.messages:
            sys.stdout.write(fio.dump_message(f))
    return 0


def roundtrip_rows(params: CodeParams, e: int, trials: int, seed: int, precode=None, max_list=None):
    """One dict per trial; trial i draws from its own spawned generator."""
    tower = params.tower()
    rows = []
    for i, rng in enumerate(spawn_rngs(seed, trials)):
        if precode is not None:
            pre = precode.random_pre(rng)
            f = precode.encode_pre(pre, tower)
        else:
            pre, f = None, random_message(params, rng)
        Y = add_rank_errors(tower, encode(params, f, tower), e, rng)
        res = decode(Y, e, params, tower, precode=precode, max_list=max_list)
        ok = f in res.messages and (pre is None or pre in res.premessages)
        s = res.stats
        rows.append({"trial": i, "success": int(ok), "list_size": s.list_size, "kernel_dim": s.kernel_dim,
                     "candidates": s.candidates, "branches": s.branches, "mode": s.mode,
                     "overflow": int(s.overflow)})
    return rows


def cmd_roundtrip(args) -> int:
    params = _params(args)
    pc = _load_precode(args, params)
    e = args.e if args.e is not None else derive_parameters(params).e_max
    rows = roundtrip_rows(params, e, args.trials, args.seed, pc, args.max_list)
    cols = list(rows[0]) if rows else ["trial", "success"]
    text = _config_line("roundtrip", params, e=e, trials=args.trials, seed=args.seed,
                        precode=pc.mode if pc else "none")
    text += ",".join(cols) + "\n"
    text += "".join(",".join(_fmt(r[c]) for c in cols) + "\n" for r in rows)
    rate = Fraction(sum(r["success"] for r in rows), len(rows)) if rows else Fraction(0)
    text += f"# success_rate={float(rate):.6f} successes={sum(r['success'] for r in rows)} trials={len(rows)}\n"
    _emit(text, args.out)
    return 0


def table_rows(r: int, c: int, rates):
    if not 1 <= c <= r - 1:
        raise InvalidParameters(f"need 1 <= c <= r-1, got c={c}, r={r}")
    rho = Fraction(1, r - 1)
    rows = []
    for R in rates:
        tau = tau_folded(R, r, c)
        uniq = unique_radius_fraction(R)
        rows.append({"R": R, "tau": tau, "tau_unique": uniq, "rate_limit": rate_limit(tau, rho),
                     "beats_unique": tau > uniq})
    return rows


def cmd_table(args) -> int:
    if args.rates:
        rates = [_frac_arg(x) for x in args.rates.split(",")]
    else:
        steps = args.steps
        rates = [args.R_min + (args.R_max - args.R_min) * Fraction(i, steps - 1) if steps > 1 else args.R_min
                 for i in range(steps)]
    rows = table_rows(args.r, args.c, rates)
    cross = crossover_rate(args.r, args.c)
    text = _config_line("table", None, r=args.r, c=args.c, s=args.r - 1, k=args.r - args.c)
    if args.c > 1:
        text += f"# crossover_R={cross} ({float(cross):.6f})\n"
    else:
        text += "# crossover_R=none (c=1 gives tau = (1-R)/2 at every rate)\n"
    text += "R,tau,tau_unique,rate_limit,beats_unique\n"
    for row in rows:
        vals = [row["R"], row["tau"], row["tau_unique"], row["rate_limit"]]
        cells = [f"{float(v):.6f}" if args.decimal else str(v) for v in vals]
        text += ",".join(cells + [_fmt(row["beats_unique"])]) + "\n"
    _emit(text, args.out)
    return 0


def cmd_oracle(args) -> int:
    params = _params(args)
    tower = params.tower()
    budget = OracleBudget(max_codewords=args.budget)
    if args.what == "mindist":
        d = brute_force_min_distance(params, tower, budget)
        text = _config_line("oracle mindist", params)
        text += fio.format_kv({"min_distance": d, "distance_bound": params.n - params.m + 1})
        _emit(text, args.out)
        return 0
    if not args.matrix or args.e is None:
        raise InvalidParameters("oracle list needs --matrix and --e")
    Y = fio.load_matrix(fio.read_text(args.matrix), tower)
    found = brute_force_list(Y, args.e, params, tower, budget)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "stats.txt").write_text(fio.format_kv({"list_size": len(found)}))
        for i, f in enumerate(found):
            (out / f"msg_{i:03d}.txt").write_text(fio.dump_message(f))
    else:
        sys.stdout.write(fio.format_kv({"list_size": len(found)}))
        for f in found:
            sys.stdout.write(fio.dump_message(f))
    return 0


def measured_kernel_dim(params: CodeParams, trials: int, seed: int) -> int:
    """Largest kernel dimension seen over seeded e_max roundtrips, at least 1."""
    rows = roundtrip_rows(params, max(derive_parameters(params).e_max, 0), trials, seed)
    return max([1] + [r["kernel_dim"] for r in rows])


def cmd_precode(args) -> int:
    params = _params(args)
    if args.mode == "hse":
        if args.zeta is None:
            raise InvalidParameters("hse mode needs --zeta")
        pc = precode_hse_build(params, args.zeta, args.alpha, args.seed)
        for w in pc.warnings:
            print(f"warning: {w}", file=sys.stderr)
    else:
        if args.epsilon is None and args.codim is None:
            raise InvalidParameters("design mode needs --epsilon or --codim")
        Lambda = params.n * params.ell * (params.r - 1)
        eps = args.epsilon if args.epsilon is not None else Fraction(args.codim, Lambda)
        v = args.v if args.v != "auto" else measured_kernel_dim(params, max(args.trials, 1), args.seed)
        design = build_design(v, eps, Lambda, args.M or params.m, mode=args.design_mode,
                              seed=args.seed, r=params.r, codim=args.codim)
        pc = precode_design_build(params, design, eps)
        cert = design.certificate
        print(f"certificate: method={cert.method} max_sum={cert.max_sum} A={cert.bound} "
              f"passed={_fmt(cert.passed)}", file=sys.stderr)
    _emit(fio.dump_precode(pc), args.out)
    return 0


# -- argument parsing -------------------------------------------------------------------

def _shared(p: argparse.ArgumentParser, params=True) -> None:
    p.add_argument("--seed", type=int, default=0, help="seed for all randomness (default 0)")
    p.add_argument("--trials", type=int, default=1, help="number of trials, where applicable")
    p.add_argument("--out", help="output file or directory (default: stdout)")
    if params:
        g = p.add_argument_group("code parameters (or --params FILE)")
        g.add_argument("--params", help="parameters file")
        g.add_argument("--r", type=int)
        g.add_argument("--ell", type=int, default=1)
        g.add_argument("--n", type=int)
        g.add_argument("--m", type=int)
        g.add_argument("--k", type=int)
        g.add_argument("--s", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rankdec", description="Folded rank-metric codes: encode, corrupt, list decode.")
    ap.add_argument("--version", action="version", version=f"rankdec {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="report derived code parameters")
    _shared(p)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("encode", help="encode a message file (or a random message)")
    _shared(p)
    p.add_argument("--msg", help="message file; a seeded random message when omitted")
    p.add_argument("--msg-out", help="where to write the sampled message")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("corrupt", help="add an error of exact rank e")
    _shared(p)
    p.add_argument("--matrix", required=True)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--error-out", help="where to write the error matrix")
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("decode", help="list decode a received matrix")
    _shared(p)
    p.add_argument("--matrix", required=True)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--precode", help="pre-code file")
    p.add_argument("--max-list", type=int)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("roundtrip", help="seeded encode/corrupt/decode trials as CSV")
    _shared(p)
    p.add_argument("--e", type=int, help="error rank (default e_max)")
    p.add_argument("--precode", help="pre-code file")
    p.add_argument("--max-list", type=int)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("table", help="radius versus rate for s = r-1, k = r-c")
    _shared(p, params=False)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--rates", help="comma-separated rates, e.g. 0,1/10,0.2")
    p.add_argument("--R-min", dest="R_min", type=_frac_arg, default=Fraction(0))
    p.add_argument("--R-max", dest="R_max", type=_frac_arg, default=Fraction(1, 2))
    p.add_argument("--steps", type=int, default=11)
    p.add_argument("--decimal", action="store_true", help="print decimals instead of exact fractions")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("oracle", help="brute-force list or minimum distance")
    _shared(p)
    p.add_argument("what", choices=["list", "mindist"])
    p.add_argument("--matrix")
    p.add_argument("--e", type=int)
    p.add_argument("--budget", type=int, default=OracleBudget().max_codewords)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("precode", help="build a pre-code file")
    _shared(p)
    p.add_argument("action", choices=["build"])
    p.add_argument("--mode", choices=["design", "hse"], required=True)
    p.add_argument("--epsilon", type=_frac_arg)
    p.add_argument("--codim", type=int)
    p.add_argument("--M", type=int, help="number of design subspaces (default m)")
    p.add_argument("--v", type=_v_arg, default="auto",
                   help="design dimension v; 'auto' measures the kernel dimension over --trials decodes")
    p.add_argument("--design-mode", choices=["random", "combined"], default="random")
    p.add_argument("--zeta", type=_frac_arg)
    p.add_argument("--alpha", type=int, default=2)
    p.set_defaults(func=cmd_precode)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidParameters as exc:
        print(f"error={type(exc).__name__} reason={exc}", file=sys.stderr)
        return 2
    except (RankDecError, OSError) as exc:
        print(f"error={type(exc).__name__} reason={exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
