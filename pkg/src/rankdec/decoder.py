"""List decoder: interpolation, coefficient identities, block-by-block
solving into a periodic candidate space, and list enumeration."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .code import CodeParams, Word, derive_parameters, encode, rank_distance
from .errors import RadiusTooLarge
from .fields import (
    LinearizedPoly,
    MessagePoly,
    Tower,
    poly_eval,
    poly_mul,
    subst_scale,
)
from .linalg import in_span, nullspace, rref, same_span, solve_affine

LIST_CAP = 10 ** 6


@dataclass
class InterpolationPoly:
    """Q = A_0(x, y) + sum_w A_w(x, z_w).

    A0[u] holds the x-coefficients of the y^(q^u) term (length r-1);
    Aw[w-1][i] those of the z_w^(q^i) term (length r-k)."""
    A0: list[list[int]]
    Aw: list[list[list[int]]]
    e: int

    def is_zero(self) -> bool:
        return not any(any(c) for c in self.A0) and not any(any(c) for A in self.Aw for c in A)

    def coefficients(self) -> list[int]:
        return [c for u in self.A0 for c in u] + [c for A in self.Aw for t in A for c in t]


def interpolation_counts(params: CodeParams, e: int) -> tuple[int, int]:
    """(unknowns, constraints) of the interpolation system."""
    r, n, m, k, s = params.r, params.n, params.m, params.k, params.s
    unknowns = (r - 1) * (n - e) + s * (r - k) * (n - e - m + 1)
    return unknowns, n * (r - 1)


def _check_interpolation_radius(params: CodeParams, e: int) -> None:
    r, n, m, k, s = params.r, params.n, params.m, params.k, params.s
    sr = s * (r - k)
    if e < 0 or e * (r - 1 + sr) >= sr * (n - m + 1):
        raise RadiusTooLarge(
            f"e={e} violates e < s(r-k)(n-m+1)/(r-1+s(r-k)) = {sr * (n - m + 1)}/{r - 1 + sr}")


def interpolate(Y: Word, e: int, params: CodeParams, tower: Tower | None = None) -> InterpolationPoly:
    """Nonzero Q vanishing at every (gamma^j, alpha_i, y_{i,j}, ..., y_{i,j+s-1})."""
    tower = tower or params.tower()
    _check_interpolation_radius(params, e)
    F = tower.fqn
    r, n, m, k, s = params.r, params.n, params.m, params.k, params.s
    n0, n1 = n - e, n - e - m + 1
    gp = [[tower.gamma_pow(j * a) for a in range(r - 1)] for j in range(r - 1)]
    afrob = [[tower.frobenius(a, u) for u in range(n0)] for a in tower.alpha]
    yfrob = [[[tower.frobenius(y, t) for t in range(n1)] for y in row] for row in Y]
    mul = F.mul
    rows = []
    for i in range(n):
        for j in range(r - 1):
            row = []
            g = gp[j]
            for u in range(n0):
                au = afrob[i][u]
                row.extend(mul(g[a], au) for a in range(r - 1))
            for w in range(1, s + 1):
                yy = yfrob[i][(j + w - 1) % (r - 1)]
                for t in range(n1):
                    row.extend(mul(g[a], yy[t]) for a in range(r - k))
            rows.append(row)
    nunk = len(rows[0])
    basis = nullspace(rows, F, nunk)
    vec = basis[0]
    A0 = [vec[u * (r - 1):(u + 1) * (r - 1)] for u in range(n0)]
    pos = n0 * (r - 1)
    Aw = []
    for _ in range(s):
        block = []
        for _ in range(n1):
            block.append(vec[pos:pos + r - k])
            pos += r - k
        Aw.append(block)
    return InterpolationPoly(A0, Aw, e)


def evaluate_interpolation(Q: InterpolationPoly, Y: Word, params: CodeParams,
                           tower: Tower | None = None) -> list[list[int]]:
    """Q(gamma^j, alpha_i, y_{i,j}, ..., y_{i,j+s-1}) for every (i, j)."""
    tower = tower or params.tower()
    F = tower.fqn
    r = params.r
    out = []
    for i, a in enumerate(tower.alpha):
        vals = []
        for j in range(r - 1):
            x = tower.gamma_pow(j)
            total = LinearizedPoly(tuple(poly_eval(F, c, x) for c in Q.A0))(tower, a)
            for w, A in enumerate(Q.Aw, start=1):
                L = LinearizedPoly(tuple(poly_eval(F, c, x) for c in A))
                total = F.add(total, L(tower, Y[i][(j + w - 1) % (r - 1)]))
            vals.append(total)
        out.append(vals)
    return out


# -- coefficient identities --------------------------------------------------------

class CoefficientIdentities:
    """The identities
        A_{0,u}(x) + sum_w sum_{i+v=u} A_{w,i}(x) f_v^{(i)}(gamma^{w-1} x) == 0,
    u = 0..n-e-1, as exact residual polynomials and as F_r-affine systems in
    the coordinates of f_0, ..., f_{m-1}."""

    def __init__(self, Q: InterpolationPoly, params: CodeParams, tower: Tower):
        self.Q, self.params, self.tower = Q, params, tower
        self.count = params.n - Q.e
        self.max_shift = params.n - Q.e - params.m
        self.gw = [tower.gamma_pow(w) for w in range(params.s)]

    def residual(self, blocks: Sequence[Sequence[int]], u: int) -> list[int]:
        F, tower = self.tower.fqn, self.tower
        res = list(self.Q.A0[u])
        for v in range(max(0, u - self.max_shift), min(u, len(blocks) - 1, self.params.m - 1) + 1):
            fv = blocks[v]
            if not any(fv):
                continue
            i = u - v
            tw = [tower.frobenius(c, i) for c in fv]
            for w in range(self.params.s):
                A = self.Q.Aw[w][i]
                if not any(A):
                    continue
                prod = poly_mul(F, A, subst_scale(F, tw, self.gw[w]))
                for t, c in enumerate(prod):
                    res[t] = F.add(res[t], c)
        return res

    def holds(self, blocks: Sequence[Sequence[int]], us: Sequence[int] | None = None) -> bool:
        us = range(self.count) if us is None else us
        return all(not any(self.residual(blocks, u)) for u in us)

    def _vec(self, polys: Sequence[Sequence[int]]) -> list[int]:
        out = []
        for p in polys:
            for c in p:
                out.extend(self.tower.vectorize(c))
        return out

    def linear_system(self, us: Sequence[int], free: Sequence[int],
                      fixed: Sequence[Sequence[int]] | None = None):
        """(A, b) with A z = b  <=>  identities ``us`` hold, where z are the F_r
        coordinates of the blocks listed in ``free`` and all other blocks take
        their value from ``fixed`` (zero when missing)."""
        params, tower = self.params, self.tower
        k, L = params.k, tower.vec_len
        m = params.m
        base = [list(fixed[a]) if fixed is not None and a < len(fixed) else [0] * k for a in range(m)]
        for a in free:
            base[a] = [0] * k
        const = self._vec([self.residual(base, u) for u in us])
        cols = []
        for a in free:
            for t in range(k):
                for d in range(L):
                    blocks = [list(b) for b in base]
                    blocks[a][t] = self.tower.r ** d
                    col = self._vec([self.residual(blocks, u) for u in us])
                    cols.append([tower.fr.sub(x, y) for x, y in zip(col, const)])
        A = [list(row) for row in zip(*cols)] if cols else []
        b = [tower.fr.neg(x) for x in const]
        return A, b

    def step_solution(self, prefix: Sequence[Sequence[int]]):
        """Affine F_r solution set (particular, basis) of identity u = a for
        block a = len(prefix), with the prefix fixed; None if inconsistent."""
        a = len(prefix)
        A, b = self.linear_system([a], [a], prefix)
        return solve_affine(A, b, self.tower.fr, self.params.block_dim)


def coefficient_identities(Q: InterpolationPoly, params: CodeParams,
                           tower: Tower | None = None) -> CoefficientIdentities:
    return CoefficientIdentities(Q, params, tower or params.tower())


@dataclass
class AffineSolution:
    particular: list[int]
    basis: list[list[int]]

    @property
    def dim(self) -> int:
        return len(self.basis)


def global_solve(Q: InterpolationPoly, params: CodeParams, tower: Tower | None = None,
                 identities: CoefficientIdentities | None = None) -> AffineSolution | None:
    """All identities at once as one F_r-linear system in m*k*ell*n unknowns."""
    tower = tower or params.tower()
    ids = identities or CoefficientIdentities(Q, params, tower)
    A, b = ids.linear_system(range(ids.count), range(params.m))
    sol = solve_affine(A, b, tower.fr, params.m * params.block_dim)
    if sol is None:
        return None
    return AffineSolution(*sol)


# -- step operator and candidate space ----------------------------------------------

def blocks_to_vec(tower: Tower, blocks: Sequence[Sequence[int]]) -> list[int]:
    return [d for b in blocks for c in b for d in tower.vectorize(c)]


def vec_to_blocks(tower: Tower, vec: Sequence[int], k: int) -> list[tuple[int, ...]]:
    L = tower.vec_len
    coeffs = [tower.devectorize(vec[i:i + L]) for i in range(0, len(vec), L)]
    return [tuple(coeffs[i:i + k]) for i in range(0, len(coeffs), k)]


@dataclass
class StepOperator:
    """T: f -> sum_w A_{w,0}(x) f(gamma^{w-1} x) on degree < k polynomials,
    as an (r-1) x k matrix over F_{q^n}."""
    matrix: list[list[int]]
    kernel: list[list[int]]
    kernel_fr: list[list[int]]
    tower: Tower

    @property
    def is_zero(self) -> bool:
        return not any(any(row) for row in self.matrix)

    def solve(self, rhs: Sequence[int]) -> list[int] | None:
        F = self.tower.fqn
        sol = solve_affine(self.matrix, rhs, F, len(self.matrix[0]))
        return None if sol is None else sol[0]


def step_operator(Q: InterpolationPoly, params: CodeParams, tower: Tower) -> StepOperator:
    F = tower.fqn
    r, k = params.r, params.k
    cols = []
    for t in range(k):
        col = [0] * (r - 1)
        for w in range(params.s):
            g = tower.gamma_pow(w * t)
            for a, c in enumerate(Q.Aw[w][0]):
                if c:
                    col[a + t] = F.add(col[a + t], F.mul(c, g))
        cols.append(col)
    matrix = [list(row) for row in zip(*cols)]
    kernel = nullspace(matrix, F, k)
    kernel_fr = []
    for vec in kernel:
        for d in range(tower.vec_len):
            unit = tower.r ** d
            kernel_fr.append(blocks_to_vec(tower, [[F.mul(c, unit) for c in vec]]))
    return StepOperator(matrix, kernel, kernel_fr, tower)


class CandidateSpace:
    """Periodic candidate structure: every block a lies in offset(prefix) + W
    with one common W = ker T. When T vanishes identically the space is
    described by the joint solution of all identities instead."""

    def __init__(self, Q: InterpolationPoly, params: CodeParams, tower: Tower):
        self.Q, self.params, self.tower = Q, params, tower
        self.identities = CoefficientIdentities(Q, params, tower)
        self.step = step_operator(Q, params, tower)
        self.mode = "global" if self.step.is_zero else "recursive"
        self.global_solution = None
        if self.mode == "global":
            self.global_solution = global_solve(Q, params, tower, self.identities)

    @property
    def W(self) -> list[list[int]]:
        return self.step.kernel_fr

    @property
    def kernel_dim(self) -> int:
        """dim over F_r of W (recursive mode) or of the joint solution space."""
        if self.mode == "global":
            return self.global_solution.dim if self.global_solution else 0
        return len(self.step.kernel_fr)

    def offset(self, prefix: Sequence[Sequence[int]]) -> list[int] | None:
        """Particular solution for block len(prefix), or None if inconsistent."""
        a = len(prefix)
        k = self.params.k
        rhs = self.identities.residual(list(prefix) + [[0] * k], a)
        F = self.tower.fqn
        return self.step.solve([F.neg(c) for c in rhs])

    def coset(self, v: Sequence[int]) -> Iterator[tuple[int, ...]]:
        """All points of v + ker T, enumerated over F_{q^n}-combinations."""
        F = self.tower.fqn
        K = self.step.kernel
        if not K:
            yield tuple(v)
            return
        for lams in itertools.product(range(F.order), repeat=len(K)):
            out = list(v)
            for lam, vec in zip(lams, K):
                if lam:
                    out = [F.add(o, F.mul(lam, c)) for o, c in zip(out, vec)]
            yield tuple(out)

    def default_max_list(self) -> int:
        r, m = self.params.r, self.params.m
        if self.mode == "global":
            exp = self.kernel_dim
        else:
            exp = self.kernel_dim * m
        return LIST_CAP if exp * r.bit_length() > 64 else min(r ** exp, LIST_CAP)


def build_candidate_space(Q: InterpolationPoly, params: CodeParams,
                          tower: Tower | None = None) -> CandidateSpace:
    return CandidateSpace(Q, params, tower or params.tower())


# -- enumeration -----------------------------------------------------------------

@dataclass
class Enumeration:
    items: list = field(default_factory=list)  # (blocks, pre-image or None)
    overflow: bool = False
    branches: int = 0
    pruned: int = 0
    visited: list = field(default_factory=list)  # prefixes whose step was solved


class _Full(Exception):
    pass


def enumerate_list(space: CandidateSpace, filt=None, max_list: int | None = None,
                   record: bool = False) -> Enumeration:
    """Depth-first block-by-block enumeration of the candidate space,
    optionally constrained by a pre-code filter."""
    params, tower = space.params, space.tower
    m = params.m
    cap = max_list if max_list is not None else space.default_max_list()
    res = Enumeration()
    trailing = range(m, space.identities.count)

    def emit(blocks, pre):
        if len(res.items) >= cap:
            res.overflow = True
            raise _Full
        res.items.append((MessagePoly(tuple(tuple(b) for b in blocks)), pre))

    if space.mode == "global":
        sol = space.global_solution
        res.branches = 1
        try:
            if sol is None:
                res.pruned = 1
            elif filt is not None:
                for vec, pre in filt.restrict_global(sol.particular, sol.basis):
                    emit(vec_to_blocks(tower, vec, params.k), pre)
            else:
                for vec in _affine_points(sol.particular, sol.basis, tower.fr):
                    emit(vec_to_blocks(tower, vec, params.k), None)
        except _Full:
            pass
        return res

    def dfs(prefix, state):
        res.branches += 1
        a = len(prefix)
        if a == m:
            if not space.identities.holds(prefix, trailing):
                res.pruned += 1
                return
            emit(prefix, filt.leaf(state) if filt is not None else None)
            return
        if record:
            res.visited.append([tuple(b) for b in prefix])
        v = space.offset(prefix)
        if v is None:
            res.pruned += 1
            return
        if filt is None:
            for blk in space.coset(v):
                dfs(prefix + [blk], None)
        else:
            vvec = blocks_to_vec(tower, [v])
            children = list(filt.branch(state, a, vvec, space.W))
            if not children:
                res.pruned += 1
            for bvec, st in children:
                dfs(prefix + [vec_to_blocks(tower, bvec, params.k)[0]], st)

    try:
        dfs([], filt.root() if filt is not None else None)
    except _Full:
        pass
    return res


def _affine_points(p: Sequence[int], basis: Sequence[Sequence[int]], F) -> Iterator[list[int]]:
    for cs in itertools.product(range(F.order), repeat=len(basis)):
        out = list(p)
        for c, b in zip(cs, basis):
            if c:
                out = [F.add(x, F.mul(c, y)) for x, y in zip(out, b)]
        yield out


def verify_periodicity(space: CandidateSpace, prefixes: Sequence[Sequence[Sequence[int]]]) -> bool:
    """Check that each recorded block step's solution set, computed directly
    from the identity for that block, is offset + W for the common W."""
    if space.mode != "recursive":
        return True
    Fr = space.tower.fr
    W = space.W
    for prefix in prefixes:
        direct = space.identities.step_solution(prefix)
        off = space.offset(prefix)
        if direct is None or off is None:
            if (direct is None) != (off is None):
                return False
            continue
        p, basis = direct
        if not same_span(basis, W, Fr):
            return False
        ovec = blocks_to_vec(space.tower, [off])
        if not in_span(W, [Fr.sub(x, y) for x, y in zip(ovec, p)], Fr):
            return False
    return True


# -- full pipeline -------------------------------------------------------------------

@dataclass
class DecodeStats:
    kernel_dim: int
    list_size: int
    candidates: int
    branches: int
    pruned: int
    interp_unknowns: int
    interp_constraints: int
    mode: str
    overflow: bool
    kernel_bound: int
    kernel_within_s_minus_1: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class DecodeResult:
    messages: list[MessagePoly]
    premessages: list | None
    stats: DecodeStats
    space: CandidateSpace | None = None
    enumeration: Enumeration | None = None

    @property
    def list(self) -> list[MessagePoly]:
        return self.messages


def decode(Y: Word, e: int, params: CodeParams, tower: Tower | None = None, precode=None,
           max_list: int | None = None, record: bool = False) -> DecodeResult:
    tower = tower or params.tower()
    e_max = derive_parameters(params).e_max
    if e > e_max:
        raise RadiusTooLarge(f"e={e} exceeds e_max={e_max}")
    Q = interpolate(Y, e, params, tower)
    space = build_candidate_space(Q, params, tower)
    filt = precode.make_filter(tower) if precode is not None else None
    if max_list is None and precode is not None:
        max_list = precode.default_max_list()
    enum = enumerate_list(space, filt, max_list, record=record)
    kept = []
    for f, pre in enum.items:
        if rank_distance(tower, encode(params, f, tower), Y) <= e:
            kept.append((f, pre))
    kept.sort(key=lambda item: tuple(item[0].flat()))
    unknowns, constraints = interpolation_counts(params, e)
    stats = DecodeStats(
        kernel_dim=space.kernel_dim,
        list_size=len(kept),
        candidates=len(enum.items),
        branches=enum.branches,
        pruned=enum.pruned,
        interp_unknowns=unknowns,
        interp_constraints=constraints,
        mode=space.mode,
        overflow=enum.overflow,
        kernel_bound=tower.vec_len * (params.s - 1),
        kernel_within_s_minus_1=space.kernel_dim <= params.s - 1,
    )
    return DecodeResult(
        messages=[f for f, _ in kept],
        premessages=[pre for _, pre in kept] if precode is not None else None,
        stats=stats,
        space=space,
        enumeration=enum,
    )
