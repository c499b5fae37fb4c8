"""Rank-error channel: adds an error matrix of exactly prescribed rank."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .code import Word, from_fq_matrix, word_add
from .errors import RankTooLarge
from .fields import Tower
from .linalg import mat_mul, rank


def make_rng(seed: int) -> np.random.Generator:
    """Philox counter-based generator; the seed fixes every draw."""
    return np.random.Generator(np.random.Philox(int(seed)))


def spawn_rngs(seed: int, count: int) -> list[np.random.Generator]:
    seqs = np.random.SeedSequence(int(seed)).spawn(count)
    return [np.random.Generator(np.random.Philox(s)) for s in seqs]


@dataclass(frozen=True)
class RankErrorSpec:
    e: int
    seed: int = 0


def _full_rank_matrix(rows: int, cols: int, tower: Tower, rng) -> list[list[int]]:
    F = tower.fq
    target = min(rows, cols)
    while True:
        M = [[int(x) for x in rng.integers(0, F.order, size=cols)] for _ in range(rows)]
        if rank(M, F) == target:
            return M


def rank_error_matrix(tower: Tower, e: int, rng) -> list[list[int]]:
    """E = U V over F_q with U n x e of full column rank and V e x t of full
    row rank, so rank(E) = e."""
    n, t = tower.n, (tower.r - 1) * tower.n
    if e < 0 or e > n:
        raise RankTooLarge(f"error rank {e} outside [0, {n}]")
    if e == 0:
        return [[0] * t for _ in range(n)]
    U = _full_rank_matrix(n, e, tower, rng)
    V = _full_rank_matrix(e, t, tower, rng)
    return mat_mul(U, V, tower.fq)


def add_rank_errors(tower: Tower, M: Word, spec: RankErrorSpec | int, rng=None) -> Word:
    """Return M + E with rank(E) = e exactly. ``rng`` overrides spec.seed."""
    if isinstance(spec, int):
        spec = RankErrorSpec(spec)
    if spec.e > tower.n or spec.e < 0:
        raise RankTooLarge(f"error rank {spec.e} outside [0, {tower.n}]")
    if rng is None:
        rng = make_rng(spec.seed)
    E = from_fq_matrix(tower, rank_error_matrix(tower, spec.e, rng))
    return word_add(tower, M, E)
