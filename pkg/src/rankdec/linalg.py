"""Exact Gaussian elimination over any ``GF`` plus a batched numpy rank
routine over prime fields (used by the brute-force oracle)."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .fields import GF


def rref(rows: Sequence[Sequence[int]], F: GF, ncols: int | None = None):
    """Reduced row echelon form. Returns (R, pivots); R keeps only the
    nonzero rows, pivots[i] is the pivot column of R[i]."""
    M = [list(r) for r in rows]
    if ncols is None:
        ncols = len(M[0]) if M else 0
    pivots = []
    rank = 0
    if F.is_prime:
        p = F.p
        for col in range(ncols):
            piv = next((i for i in range(rank, len(M)) if M[i][col]), None)
            if piv is None:
                continue
            M[rank], M[piv] = M[piv], M[rank]
            row = M[rank]
            inv = pow(row[col], p - 2, p)
            if inv != 1:
                row = M[rank] = [x * inv % p for x in row]
            for i in range(len(M)):
                if i != rank:
                    c = M[i][col]
                    if c:
                        Mi = M[i]
                        M[i] = [(x - c * y) % p for x, y in zip(Mi, row)]
            pivots.append(col)
            rank += 1
            if rank == len(M):
                break
    else:
        mul, sub, inv_ = F.mul, F.sub, F.inv
        for col in range(ncols):
            piv = next((i for i in range(rank, len(M)) if M[i][col]), None)
            if piv is None:
                continue
            M[rank], M[piv] = M[piv], M[rank]
            row = M[rank]
            lead = row[col]
            if lead != 1:
                il = inv_(lead)
                row = M[rank] = [mul(x, il) if x else 0 for x in row]
            nz = [(j, y) for j, y in enumerate(row) if y]
            for i in range(len(M)):
                if i != rank:
                    c = M[i][col]
                    if c:
                        Mi = M[i]
                        for j, y in nz:
                            Mi[j] = sub(Mi[j], mul(c, y))
            pivots.append(col)
            rank += 1
            if rank == len(M):
                break
    return M[:rank], pivots


def rank(rows: Sequence[Sequence[int]], F: GF) -> int:
    if not rows:
        return 0
    return len(rref(rows, F)[1])


def nullspace(rows: Sequence[Sequence[int]], F: GF, ncols: int) -> list[list[int]]:
    """Basis of {x : rows @ x = 0}; one vector per free column, in
    increasing free-column order, with that free variable set to 1."""
    if not rows:
        return [[1 if j == i else 0 for j in range(ncols)] for i in range(ncols)]
    R, piv = rref(rows, F, ncols)
    pivset = set(piv)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [0] * ncols
        v[free] = 1
        for r, pc in zip(R, piv):
            if r[free]:
                v[pc] = F.neg(r[free])
        basis.append(v)
    return basis


def solve_affine(A: Sequence[Sequence[int]], b: Sequence[int], F: GF, ncols: int):
    """Solutions of A x = b as (particular, basis), or None if inconsistent."""
    if not A:
        return [0] * ncols, nullspace([], F, ncols)
    aug = [list(r) + [c] for r, c in zip(A, b)]
    R, piv = rref(aug, F, ncols + 1)
    if piv and piv[-1] == ncols:
        return None
    x0 = [0] * ncols
    for r, pc in zip(R, piv):
        x0[pc] = r[ncols]
    pivset = set(piv)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [0] * ncols
        v[free] = 1
        for r, pc in zip(R, piv):
            if r[free]:
                v[pc] = F.neg(r[free])
        basis.append(v)
    return x0, basis


def in_span(basis: Sequence[Sequence[int]], v: Sequence[int], F: GF) -> bool:
    if not any(v):
        return True
    if not basis:
        return False
    return rank(list(basis) + [list(v)], F) == rank(basis, F)


def same_span(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], F: GF) -> bool:
    ra, rb = rank(a, F) if a else 0, rank(b, F) if b else 0
    if ra != rb:
        return False
    if ra == 0:
        return True
    return rank(list(a) + list(b), F) == ra


def mat_vec(M: Sequence[Sequence[int]], x: Sequence[int], F: GF) -> list[int]:
    out = []
    for row in M:
        acc = 0
        for a, b in zip(row, x):
            if a and b:
                acc = F.add(acc, F.mul(a, b))
        out.append(acc)
    return out


def mat_mul(A, B, F: GF) -> list[list[int]]:
    cols = list(zip(*B))
    return [mat_vec(cols, row, F) for row in A]


def vec_add(a, b, F: GF) -> list[int]:
    return [F.add(x, y) for x, y in zip(a, b)]


def vec_sub(a, b, F: GF) -> list[int]:
    return [F.sub(x, y) for x, y in zip(a, b)]


def vec_scale(a, c, F: GF) -> list[int]:
    return [F.mul(x, c) for x in a]


def intersect_subspaces(a, b, F: GF, dim: int) -> list[list[int]]:
    """Basis of span(a) ∩ span(b) inside F^dim."""
    if not a or not b:
        return []
    # x in span(a) ∩ span(b)  <=>  sum c_i a_i - sum d_j b_j = 0
    cols = [list(v) for v in a] + [[F.neg(x) for x in v] for v in b]
    system = [list(row) for row in zip(*cols)]
    kern = nullspace(system, F, len(cols))
    out = [[0] * dim for _ in kern]
    for o, c in zip(out, kern):
        for ci, v in zip(c[:len(a)], a):
            if ci:
                for t in range(dim):
                    if v[t]:
                        o[t] = F.add(o[t], F.mul(ci, v[t]))
    if not out:
        return []
    R, _ = rref(out, F, dim)
    return R


def batch_rank_mod_p(mats: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a stack of matrices over F_p, shape (B, rows, cols)."""
    A = np.array(mats, dtype=np.int64) % p
    if A.shape[1] < A.shape[2]:
        A = np.ascontiguousarray(A.transpose(0, 2, 1))
    B, R, C = A.shape
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, p - 2, p)
    rk = np.zeros(B, dtype=np.int64)
    row_idx = np.arange(R)
    bidx = np.arange(B)
    for col in range(C):
        colv = A[:, :, col]
        mask = (colv != 0) & (row_idx[None, :] >= rk[:, None])
        has = mask.any(axis=1)
        if not has.any():
            continue
        piv = np.argmax(mask, axis=1)
        b = bidx[has]
        pr, tr = piv[has], rk[has]
        prow = A[b, pr].copy()
        A[b, pr] = A[b, tr]
        A[b, tr] = prow
        prow = prow * inv[prow[:, col]][:, None] % p
        A[b, tr] = prow
        factors = A[b, :, col].copy()
        factors[np.arange(len(b)), tr] = 0
        factors[row_idx[None, :] < tr[:, None]] = 0
        A[b] = (A[b] - factors[:, :, None] * prow[:, None, :]) % p
        rk[has] += 1
    return rk
