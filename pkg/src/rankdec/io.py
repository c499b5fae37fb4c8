"""Line-oriented text formats for parameters, matrices, messages, pre-codes
and decode statistics. Field elements are written as canonical integers."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .code import CodeParams, Word, fq_matrix, from_fq_matrix
from .errors import FormatError
from .fields import MessagePoly, Tower
from .pruning import DesignPrecode, HsePrecode, hse_guard_warnings

PARAMS_HEADER = "rankdec-params v1"
MATRIX_HEADER = "rankdec-matrix v1"
MESSAGE_HEADER = "rankdec-msg v1"
PRECODE_HEADER = "rankdec-precode v1"
PARAM_KEYS = ("r", "ell", "n", "m", "k", "s")


def _lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def _ints(line: str) -> list[int]:
    try:
        return [int(x) for x in line.split()]
    except ValueError as exc:
        raise FormatError(f"expected integers, got {line!r}") from exc


def _expect_header(lines: list[str], header: str) -> None:
    if not lines or not lines[0].startswith(header):
        found = lines[0] if lines else "<empty>"
        raise FormatError(f"expected header {header!r}, found {found!r}")


def parse_kv(lines: Sequence[str]) -> dict[str, str]:
    out = {}
    for ln in lines:
        for tok in ln.split():
            if "=" not in tok:
                raise FormatError(f"expected key=value, got {tok!r}")
            key, val = tok.split("=", 1)
            out[key] = val
    return out


def format_kv(pairs: dict) -> str:
    return "".join(f"{k}={v}\n" for k, v in pairs.items())


# -- parameters -------------------------------------------------------------------

def dump_params(params: CodeParams, extra: dict | None = None) -> str:
    body = {k: getattr(params, k) for k in PARAM_KEYS}
    body.update(extra or {})
    return PARAMS_HEADER + "\n" + format_kv(body)


def load_params(text: str) -> CodeParams:
    lines = _lines(text)
    _expect_header(lines, PARAMS_HEADER)
    kv = parse_kv(lines[1:])
    missing = [k for k in PARAM_KEYS[:5] if k not in kv]
    if missing:
        raise FormatError(f"params file lacks {', '.join(missing)}")
    try:
        vals = {k: int(kv[k]) for k in PARAM_KEYS if k in kv}
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    return CodeParams(**vals)


# -- matrices and messages ---------------------------------------------------------

def dump_matrix(tower: Tower, word: Word) -> str:
    M = fq_matrix(tower, word)
    head = f"{MATRIX_HEADER} {tower.r} {tower.ell} {tower.n} {len(M[0])}\n"
    return head + "".join(" ".join(map(str, row)) + "\n" for row in M)


def load_matrix(text: str, tower: Tower) -> Word:
    lines = _lines(text)
    _expect_header(lines, MATRIX_HEADER)
    head = lines[0].split()
    if len(head) != 6:
        raise FormatError(f"malformed matrix header {lines[0]!r}")
    r, ell, n, cols = (int(x) for x in head[2:])
    if (r, ell, n) != (tower.r, tower.ell, tower.n):
        raise FormatError(f"matrix is for (r, ell, n) = {(r, ell, n)}, expected {(tower.r, tower.ell, tower.n)}")
    if cols != (r - 1) * n:
        raise FormatError(f"matrix has {cols} columns, expected {(r - 1) * n}")
    rows = [_ints(ln) for ln in lines[1:]]
    if len(rows) != n or any(len(row) != cols for row in rows):
        raise FormatError(f"matrix body must be {n} rows of {cols} entries")
    if any(not 0 <= x < tower.q for row in rows for x in row):
        raise FormatError(f"matrix entries must lie in [0, {tower.q})")
    return from_fq_matrix(tower, rows)


def dump_message(f: MessagePoly) -> str:
    return MESSAGE_HEADER + "\n" + "".join(" ".join(map(str, b)) + "\n" for b in f.blocks)


def load_message(text: str, params: CodeParams) -> MessagePoly:
    lines = _lines(text)
    _expect_header(lines, MESSAGE_HEADER)
    vals = [x for ln in lines[1:] for x in _ints(ln)]
    if len(vals) != params.m * params.k:
        raise FormatError(f"message has {len(vals)} coefficients, expected {params.m * params.k}")
    Q = params.q ** params.n
    if any(not 0 <= x < Q for x in vals):
        raise FormatError(f"coefficients must lie in [0, {Q})")
    return MessagePoly.from_flat(vals, params.m, params.k)


def dump_pre_message(x: Sequence[int]) -> str:
    return MESSAGE_HEADER + " pre\n" + " ".join(map(str, x)) + "\n"


# -- pre-codes --------------------------------------------------------------------

def dump_precode(pc) -> str:
    params = {k: getattr(pc.params, k) for k in PARAM_KEYS}
    out = [PRECODE_HEADER, f"mode {pc.mode}"]
    if pc.mode == "design":
        extra = {"A": pc.A, "blocks": len(pc.bases)}
        if pc.epsilon is not None:
            extra["epsilon"] = pc.epsilon
        if pc.seed is not None:
            extra["seed"] = pc.seed
        out.append(" ".join(f"{k}={v}" for k, v in {**params, **extra}.items()))
        for i, B in enumerate(pc.bases):
            out.append(f"block {i} {len(B)}")
            out.extend(" ".join(map(str, row)) for row in B)
    else:
        extra = {"zeta": pc.zeta, "alpha": pc.alpha, "seed": pc.seed, "d": pc.d, "kappa": pc.kappa}
        out.append(" ".join(f"{k}={v}" for k, v in {**params, **extra}.items()))
        out.extend(" ".join(map(str, row)) for row in pc.G)
    return "\n".join(out) + "\n"


def load_precode(text: str):
    try:
        return _load_precode(text)
    except (KeyError, IndexError) as exc:
        raise FormatError(f"truncated or incomplete pre-code file ({exc})") from exc


def _load_precode(text: str):
    lines = _lines(text)
    _expect_header(lines, PRECODE_HEADER)
    if len(lines) < 3 or not lines[1].startswith("mode "):
        raise FormatError("pre-code file lacks a mode line")
    mode = lines[1].split()[1]
    kv = parse_kv([lines[2]])
    params = CodeParams(**{k: int(kv[k]) for k in PARAM_KEYS if k in kv})
    body = lines[3:]
    if mode == "design":
        bases, pos = [], 0
        for _ in range(int(kv["blocks"])):
            head = body[pos].split()
            if head[0] != "block":
                raise FormatError(f"expected a block line, got {body[pos]!r}")
            dim = int(head[2])
            rows = [_ints(ln) for ln in body[pos + 1:pos + 1 + dim]]
            if len(rows) != dim or any(len(r) != params.block_dim for r in rows):
                raise FormatError(f"block {head[1]} must have {dim} rows of {params.block_dim} entries")
            bases.append(rows)
            pos += 1 + dim
        eps = Fraction(kv["epsilon"]) if "epsilon" in kv else None
        seed = int(kv["seed"]) if "seed" in kv else None
        return DesignPrecode(params, bases, int(kv["A"]), eps, seed)
    if mode == "hse":
        d, kappa = int(kv["d"]), int(kv["kappa"])
        G = [_ints(ln) for ln in body]
        if len(G) != kappa or any(len(row) != d for row in G):
            raise FormatError(f"hse matrix must be {kappa} rows of {d} entries")
        zeta, alpha, seed = Fraction(kv["zeta"]), int(kv["alpha"]), int(kv["seed"])
        return HsePrecode(params, zeta, alpha, seed, G, d, hse_guard_warnings(params, zeta, alpha, d))
    raise FormatError(f"unknown pre-code mode {mode!r}")


# -- stats --------------------------------------------------------------------------

STATS_KEYS = ("kernel_dim", "list_size", "branches", "interp_unknowns", "interp_constraints")


def dump_stats(stats) -> str:
    d = stats.as_dict()
    ordered = {k: d[k] for k in STATS_KEYS}
    ordered.update({k: v for k, v in d.items() if k not in ordered})
    return format_kv({k: (int(v) if isinstance(v, bool) else v) for k, v in ordered.items()})


def load_stats(text: str) -> dict[str, str]:
    return parse_kv(_lines(text))


def read_text(path) -> str:
    return Path(path).read_text()


def write_text(path, text: str) -> None:
    Path(path).write_text(text)
