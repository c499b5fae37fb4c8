"""Brute-force reference: enumerate every codeword of a small code.

Encoding is F_p-linear, so all codewords are F_p-combinations of the
images of an F_p basis of the message space. Each F_q entry is replaced by
its multiplication matrix over F_p; the F_p rank of the expanded matrix is
e_q times the F_q rank, where q = p^e_q. Ranks are computed in numpy
batches."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .code import CodeParams, Word, encode, fq_matrix
from .errors import BudgetExceeded
from .fields import MessagePoly, Tower, digits
from .linalg import batch_rank_mod_p


@dataclass(frozen=True)
class OracleBudget:
    max_codewords: int = 10 ** 6
    chunk: int = 4096


def codeword_count(params: CodeParams) -> int:
    return params.q ** (params.n * params.k * params.m)


def _check_budget(params: CodeParams, budget: OracleBudget) -> None:
    count = codeword_count(params)
    if count > budget.max_codewords:
        raise BudgetExceeded(f"{count} codewords exceed the oracle budget of {budget.max_codewords}")


def _mult_matrix(F, c: int, p: int, eq: int) -> np.ndarray:
    """Matrix over F_p of y -> c*y in the digit basis of F_q."""
    cols = [digits(F.mul(c, p ** i), p, eq) for i in range(eq)]
    return np.array(cols, dtype=np.int64).T


def _expand(tower: Tower, word: Word) -> np.ndarray:
    F = tower.fq
    p = tower.p
    eq = tower.fq.abs_degree
    M = fq_matrix(tower, word)
    rows, cols = len(M), len(M[0])
    out = np.zeros((rows * eq, cols * eq), dtype=np.int64)
    for i in range(rows):
        for j in range(cols):
            if M[i][j]:
                out[i * eq:(i + 1) * eq, j * eq:(j + 1) * eq] = _mult_matrix(F, M[i][j], p, eq)
    return out


@lru_cache(maxsize=32)
def _basis(params: CodeParams):
    """F_p basis of the message space with the expanded image of each
    element; coefficient index c, digit d maps to row c * D + d."""
    tower = params.tower()
    p = tower.p
    D = tower.fqn.abs_degree
    mats, k, m = [], params.k, params.m
    for c in range(m * k):
        for d in range(D):
            flat = [0] * (m * k)
            flat[c] = p ** d
            f = MessagePoly.from_flat(flat, m, k)
            mats.append(_expand(tower, encode(params, f, tower)))
    return np.stack(mats), D


def _chunks(total: int, size: int):
    for start in range(0, total, size):
        yield start, min(total, start + size)


def _index_digits(idx: np.ndarray, p: int, N: int) -> np.ndarray:
    out = np.empty((len(idx), N), dtype=np.int64)
    x = idx.copy()
    for j in range(N):
        out[:, j] = x % p
        x //= p
    return out


def _scan(params: CodeParams, tower: Tower, budget: OracleBudget, target: np.ndarray | None):
    """Yield (coordinate digits, F_q ranks of codeword - target) per chunk."""
    p = tower.p
    basis, D = _basis(params)
    N = basis.shape[0]
    eq = basis.shape[1] // params.n
    flat = basis.reshape(N, -1)
    total = p ** N
    for lo, hi in _chunks(total, budget.chunk):
        a = _index_digits(np.arange(lo, hi, dtype=np.int64), p, N)
        mats = (a @ flat) % p
        if target is not None:
            mats = (mats - target.reshape(1, -1)) % p
        ranks = batch_rank_mod_p(mats.reshape(len(a), *basis.shape[1:]), p) // eq
        yield a, ranks, D


def _to_message(params: CodeParams, p: int, D: int, a: np.ndarray) -> MessagePoly:
    vals = [int(sum(int(a[c * D + d]) * p ** d for d in range(D))) for c in range(params.m * params.k)]
    return MessagePoly.from_flat(vals, params.m, params.k)


def brute_force_list(Y: Word, e: int, params: CodeParams, tower: Tower | None = None,
                     budget: OracleBudget = OracleBudget()) -> list[MessagePoly]:
    """Every message whose codeword lies within rank distance e of Y,
    sorted by the flattened coefficient tuple."""
    _check_budget(params, budget)
    tower = tower or params.tower()
    target = _expand(tower, Y)
    out = []
    for a, ranks, D in _scan(params, tower, budget, target):
        for row in a[ranks <= e]:
            out.append(_to_message(params, tower.p, D, row))
    out.sort(key=lambda f: tuple(f.flat()))
    return out


def brute_force_min_distance(params: CodeParams, tower: Tower | None = None,
                             budget: OracleBudget = OracleBudget()) -> int:
    """Minimum rank weight over all nonzero codewords."""
    _check_budget(params, budget)
    tower = tower or params.tower()
    best = None
    for a, ranks, _ in _scan(params, tower, budget, None):
        nonzero = a.any(axis=1)
        if nonzero.any():
            low = int(ranks[nonzero].min())
            best = low if best is None else min(best, low)
    return best if best is not None else 0
