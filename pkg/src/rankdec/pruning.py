"""List pruning: explicit subspace-evasive sets, subspace designs (with a
verifier), the design pre-code and the randomized injective pre-code.

Vectors over F_r are plain lists of ints. A message block (a polynomial of
degree < k over F_{q^n}) has F_r-coordinates ordered coefficient by
coefficient, each coefficient contributing its ell*n base-r digits; the
same layout, extended to degree < r-1, is used for the ambient space of a
subspace design.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .channel import make_rng
from .code import CodeParams
from .errors import EmptyBlock, ParameterInfeasible
from .fields import GF, MessagePoly, Tower, digits, field_of_order, factor_prime_power
from .linalg import intersect_subspaces, mat_vec, nullspace, rank, rref, solve_affine


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x))


def _fr_field(r: int) -> GF:
    p, e = factor_prime_power(r)
    return field_of_order(p, (e,))


def _combine(F: GF, p: Sequence[int], basis: Sequence[Sequence[int]], coeffs: Sequence[int]) -> list[int]:
    out = list(p)
    for c, b in zip(coeffs, basis):
        if c:
            out = [F.add(x, F.mul(c, y)) for x, y in zip(out, b)]
    return out


def affine_points(F: GF, p: Sequence[int], basis: Sequence[Sequence[int]]) -> Iterator[list[int]]:
    for cs in itertools.product(range(F.order), repeat=len(basis)):
        yield _combine(F, p, basis, cs)


# -- subspace-evasive sets -------------------------------------------------------------

@dataclass
class EvasiveSet:
    """The F_r-linear set (V ∩ F_{q1}^h)^(Lambda'/h) with V cut out by
    f_i(x) = sum_j gamma_j^i x_j^(r^(h-j)), i = 1..v."""
    r: int
    v: int
    h: int
    epsilon: Fraction
    lam: int
    Lambda: int
    field: GF
    points: list[int]
    degrees: list[int]
    block_basis: list[list[int]]

    @property
    def q1(self) -> int:
        return self.field.order

    @property
    def Lambda_prime(self) -> int:
        return self.Lambda // self.lam

    @property
    def blocks(self) -> int:
        return self.Lambda_prime // self.h

    @property
    def dim(self) -> int:
        return len(self.block_basis) * self.blocks

    def equations(self, x: Sequence[int]) -> list[int]:
        """(f_1(x), ..., f_v(x)) for x in F_{q1}^h."""
        F = self.field
        out = []
        for i in range(1, self.v + 1):
            acc = 0
            for g, d, xj in zip(self.points, self.degrees, x):
                if xj:
                    acc = F.add(acc, F.mul(F.pow(g, i), F.pow(xj, d)))
            out.append(acc)
        return out

    def block_contains(self, x: Sequence[int]) -> bool:
        return not any(self.equations(x))

    def basis(self) -> list[list[int]]:
        """F_r basis of the full product set inside F_r^Lambda."""
        width = self.lam * self.h
        out = []
        for b in range(self.blocks):
            for vec in self.block_basis:
                row = [0] * self.Lambda
                row[b * width:(b + 1) * width] = vec
                out.append(row)
        return out

    def to_fr(self, x: Sequence[int]) -> list[int]:
        return [d for c in x for d in digits(c, self.r, self.lam)]

    def from_fr(self, vec: Sequence[int]) -> list[int]:
        lam = self.lam
        return [sum(vec[i + t] * self.r ** t for t in range(lam)) for i in range(0, len(vec), lam)]

    def affine_intersection_size(self, a: Sequence[int], directions: Sequence[Sequence[int]]) -> int:
        """|{a + sum t_i b_i : t in F_{q1}^v} ∩ V| for one block, by an F_r
        linear solve in the coordinates of t."""
        F, lam = self.field, self.lam
        Fr = _fr_field(self.r)
        nv = len(directions)

        def image(ts):
            x = list(a)
            for t, b in zip(ts, directions):
                if t:
                    x = [F.add(xi, F.mul(t, bi)) for xi, bi in zip(x, b)]
            return [d for c in self.equations(x) for d in digits(c, self.r, lam)]

        const = image([0] * nv)
        cols = []
        for i in range(nv):
            for c in range(lam):
                ts = [0] * nv
                ts[i] = self.r ** c
                cols.append([Fr.sub(x, y) for x, y in zip(image(ts), const)])
        A = [list(row) for row in zip(*cols)]
        sol = solve_affine(A, [Fr.neg(x) for x in const], Fr, nv * lam)
        return 0 if sol is None else self.r ** len(sol[1])


def _evasive_choice(r: int, v: int, eps: Fraction, Lambda: int):
    h = math.ceil(Fraction(v) / eps)
    for lam in range(1, Lambda + 1):
        if Lambda % lam:
            continue
        q1 = r ** lam
        if q1 > Lambda and q1 - 1 >= h and (Lambda // lam) % h == 0:
            return h, lam
    return h, None


def build_evasive(v: int, epsilon, Lambda: int, r: int) -> EvasiveSet:
    eps = _frac(epsilon)
    if not 0 < eps < 1:
        raise ParameterInfeasible(f"epsilon must lie in (0, 1), got {eps}")
    if v < 1:
        raise ParameterInfeasible("v must be positive")
    h, lam = _evasive_choice(r, v, eps, Lambda)
    if lam is None:
        feasible = next(L for L in itertools.count(Lambda + 1) if _evasive_choice(r, v, eps, L)[1])
        raise ParameterInfeasible(
            f"no extension degree lambda works for Lambda={Lambda} (h={h}); "
            f"smallest feasible Lambda is {feasible}")
    p, er = factor_prime_power(r)
    Fq1 = field_of_order(p, (er, lam))
    points = list(range(1, h + 1))
    degrees = [r ** (h - j) for j in range(1, h + 1)]
    ev = EvasiveSet(r, v, h, eps, lam, Lambda, Fq1, points, degrees, [])
    Fr = _fr_field(r)
    cols = []
    for j in range(h):
        for c in range(lam):
            x = [0] * h
            x[j] = r ** c
            cols.append([d for y in ev.equations(x) for d in digits(y, r, lam)])
    A = [list(row) for row in zip(*cols)]
    ev.block_basis = nullspace(A, Fr, h * lam)
    return ev


# -- subspace designs ------------------------------------------------------------------

@dataclass
class DesignCertificate:
    max_sum: int
    bound: int
    passed: bool
    method: str
    checked: int


@dataclass
class SubspaceDesign:
    r: int
    Lambda: int
    subspaces: list[list[list[int]]]
    A: int
    v: int
    codim_bound: int
    mode: str
    seed: int | None = None
    certificate: DesignCertificate | None = None
    evasive: EvasiveSet | None = field(default=None, repr=False)

    @property
    def M(self) -> int:
        return len(self.subspaces)


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def _all_subspaces(F: GF, n: int, k: int) -> Iterator[list[list[int]]]:
    """Every k-dimensional subspace of F^n, as its RREF basis."""
    for pivots in itertools.combinations(range(n), k):
        slots = [(i, j) for i, pc in enumerate(pivots) for j in range(pc + 1, n) if j not in pivots]
        for vals in itertools.product(range(F.order), repeat=len(slots)):
            rows = [[0] * n for _ in range(k)]
            for i, pc in enumerate(pivots):
                rows[i][pc] = 1
            for (i, j), x in zip(slots, vals):
                rows[i][j] = x
            yield rows


def _random_subspace(F: GF, n: int, k: int, rng) -> list[list[int]]:
    while True:
        rows = [[int(x) for x in rng.integers(0, F.order, size=n)] for _ in range(k)]
        if rank(rows, F) == k:
            return rows


def _intersection_dim(F: GF, H: Sequence[Sequence[int]], rH: int, W: Sequence[Sequence[int]], v: int) -> int:
    if not H:
        return 0
    return rH + v - rank(list(H) + list(W), F)


def verify_design(design: SubspaceDesign, v: int, trials: int = 200, exhaustive_threshold: int = 20000,
                  seed: int = 0) -> DesignCertificate:
    """Largest observed sum_i dim(H_i ∩ W) over v-dimensional W.

    Enumerates every W when there are at most ``exhaustive_threshold`` of
    them. For v = 1 the maximum is computed exactly through the lattice of
    intersections (a line lies in H_i for i in S iff ∩_S H_i is nonzero).
    Otherwise ``trials`` seeded random W are tested."""
    F = _fr_field(design.r)
    L = design.Lambda
    Hs = design.subspaces
    ranks = [rank(H, F) if H else 0 for H in Hs]
    count = gaussian_binomial(L, v, design.r)
    if count <= exhaustive_threshold:
        best = 0
        for W in _all_subspaces(F, L, v):
            best = max(best, sum(_intersection_dim(F, H, rH, W, v) for H, rH in zip(Hs, ranks)))
        method, checked = "exhaustive", count
    elif v == 1:
        best, checked = _max_common_line(F, Hs, L), count
        method = "intersection-lattice"
    else:
        rng = make_rng(seed)
        best = 0
        for _ in range(trials):
            W = _random_subspace(F, L, v, rng)
            best = max(best, sum(_intersection_dim(F, H, rH, W, v) for H, rH in zip(Hs, ranks)))
        method, checked = "random", trials
    return DesignCertificate(best, design.A, best <= design.A, method, checked)


def _max_common_line(F: GF, Hs, L: int) -> int:
    """max |S| such that the subspaces indexed by S share a nonzero vector."""
    best = 0

    def grow(start, current, size):
        nonlocal best
        best = max(best, size)
        for i in range(start, len(Hs)):
            if size + (len(Hs) - i) <= best:
                return
            nxt = intersect_subspaces(current, Hs[i], F, L) if current is not None else rref(Hs[i], F, L)[0]
            if nxt:
                grow(i + 1, nxt, size + 1)

    grow(0, None, 0)
    return best


def _random_codim_subspace(F: GF, L: int, codim: int, rng) -> list[list[int]]:
    checks = _random_subspace(F, L, codim, rng) if codim else []
    return nullspace(checks, F, L)


SubspaceProvider = Callable[[GF, int, int, int, object], list]


def random_fq1_subspaces(Fq1: GF, n: int, codim: int, M: int, rng) -> list[list[list[int]]]:
    """Fallback provider: M seeded random F_{q1}-subspaces of F_{q1}^n of the
    given codimension."""
    return [_random_codim_subspace(Fq1, n, codim, rng) for _ in range(M)]


def build_design(v: int, epsilon, Lambda: int, M: int, mode: str = "random", seed: int = 0,
                 r: int = 3, codim: int | None = None, A: int | None = None,
                 provider: SubspaceProvider | None = None, max_attempts: int = 100,
                 trials: int = 200) -> SubspaceDesign:
    """Build a subspace design of M subspaces of F_r^Lambda.

    ``random``: sample subspaces of codimension ceil(epsilon*Lambda) (or
    ``codim``) and keep the first sample the verifier certifies against A.
    ``combined``: intersect F_{q1}-subspaces from ``provider`` with the
    explicit evasive set; A = 2v(h-1)/epsilon."""
    eps = _frac(epsilon)
    F = _fr_field(r)
    rng = make_rng(seed)
    if mode == "random":
        c = codim if codim is not None else math.ceil(eps * Lambda)
        if not 0 <= c <= Lambda:
            raise ParameterInfeasible(f"codimension {c} outside [0, {Lambda}]")
        bound = A if A is not None else v * min(M, (Lambda - v) // c if c else M)
        for _ in range(max_attempts):
            subs = [_random_codim_subspace(F, Lambda, c, rng) for _ in range(M)]
            design = SubspaceDesign(r, Lambda, subs, bound, v, c, "random", seed)
            cert = verify_design(design, v, trials=trials, seed=seed)
            if cert.passed:
                design.certificate = cert
                return design
        raise ParameterInfeasible(f"no certified random design after {max_attempts} samples")
    if mode != "combined":
        raise ParameterInfeasible(f"unknown design mode {mode!r}")
    ev = build_evasive(v, eps, Lambda, r)
    Lp = ev.Lambda_prime
    if v > eps * Lp / 4:
        raise ParameterInfeasible(
            f"combined mode needs v <= epsilon*Lambda'/4 = {float(eps * Lp / 4):.3g} "
            f"(Lambda'={Lp}); desk-scale Lambda is usually too small")
    c1 = math.floor(eps * Lp)
    provider = provider or random_fq1_subspaces
    Vs = provider(ev.field, Lp, c1, M, rng)
    S = ev.basis()
    subs = []
    for V in Vs:
        # F_r span of an F_{q1}-subspace: scale each basis vector by an F_r basis of F_{q1}
        Vr = [ev.to_fr([ev.field.mul(r ** t, x) for x in vec]) for vec in V for t in range(ev.lam)]
        subs.append(intersect_subspaces(Vr, S, F, Lambda))
    bound = A if A is not None else math.floor(2 * v * (ev.h - 1) / eps)
    design = SubspaceDesign(r, Lambda, subs, bound, v, math.floor(2 * eps * Lambda), "combined", seed,
                            evasive=ev)
    design.certificate = verify_design(design, v, trials=trials, seed=seed)
    return design


# -- pre-codes ----------------------------------------------------------------------------

class DesignPrecode:
    """Messages whose block i lies in H_i ∩ {degree < k}; pre-messages are
    coordinates in the bases of those intersections."""

    mode = "design"

    def __init__(self, params: CodeParams, bases: list[list[list[int]]], A: int,
                 epsilon: Fraction | None = None, seed: int | None = None,
                 design: SubspaceDesign | None = None):
        self.params = params
        self.bases = bases
        self.A = A
        self.epsilon = epsilon
        self.seed = seed
        self.design = design
        self.fr = _fr_field(params.r)

    @property
    def dims(self) -> list[int]:
        return [len(b) for b in self.bases]

    @property
    def dim(self) -> int:
        return sum(self.dims)

    @property
    def rate(self) -> Fraction:
        p = self.params
        return Fraction(self.dim, p.ell * (p.r - 1) * p.n ** 2)

    def encode_pre(self, pre: Sequence[int], tower: Tower) -> MessagePoly:
        blocks, pos = [], 0
        for B in self.bases:
            c = pre[pos:pos + len(B)]
            pos += len(B)
            vec = _combine(self.fr, [0] * self.params.block_dim, B, c)
            blocks.append(_vec_block(tower, vec, self.params.k))
        return MessagePoly(tuple(blocks))

    def random_pre(self, rng) -> list[int]:
        return [int(x) for x in rng.integers(0, self.params.r, size=self.dim)]

    def default_max_list(self) -> int:
        return min(self.params.r ** self.A, 10 ** 6)

    def make_filter(self, tower: Tower) -> DesignFilter:
        return DesignFilter(self)


class HsePrecode:
    """Seeded injective F_r-linear map G: F_r^d -> F_r^kappa, d = (1-2 zeta) kappa."""

    mode = "hse"

    def __init__(self, params: CodeParams, zeta: Fraction, alpha: int, seed: int, G: list[list[int]],
                 d: int, warnings: list[str]):
        self.params, self.zeta, self.alpha, self.seed = params, zeta, alpha, seed
        self.G, self.d = G, d
        self.kappa = params.m * params.block_dim
        self.warnings = warnings
        self.fr = _fr_field(params.r)

    @property
    def guards_ok(self) -> bool:
        return not self.warnings

    @property
    def dim(self) -> int:
        return self.d

    @property
    def rate(self) -> Fraction:
        p = self.params
        return Fraction(self.d, p.ell * (p.r - 1) * p.n ** 2)

    @property
    def list_bound(self) -> Fraction:
        return Fraction(self.alpha + 1) / self.zeta

    def apply(self, x: Sequence[int]) -> list[int]:
        return mat_vec(self.G, x, self.fr)

    def encode_pre(self, pre: Sequence[int], tower: Tower) -> MessagePoly:
        vec = self.apply(pre)
        bd = self.params.block_dim
        return MessagePoly(tuple(_vec_block(tower, vec[i:i + bd], self.params.k)
                                 for i in range(0, self.kappa, bd)))

    def random_pre(self, rng) -> list[int]:
        return [int(x) for x in rng.integers(0, self.params.r, size=self.d)]

    def default_max_list(self) -> int:
        return math.ceil(4 * self.list_bound)

    def make_filter(self, tower: Tower) -> HseFilter:
        return HseFilter(self)


def _vec_block(tower: Tower, vec: Sequence[int], k: int) -> tuple[int, ...]:
    L = tower.vec_len
    return tuple(tower.devectorize(vec[i:i + L]) for i in range(0, k * L, L))


def precode_design_build(params: CodeParams, design: SubspaceDesign, epsilon=None) -> DesignPrecode:
    Lambda = params.n * params.ell * (params.r - 1)
    if design.Lambda != Lambda:
        raise ParameterInfeasible(f"design lives in F_r^{design.Lambda}, need Lambda = n*ell*(r-1) = {Lambda}")
    if design.M < params.m:
        raise ParameterInfeasible(f"design has {design.M} subspaces, need m = {params.m}")
    F = _fr_field(params.r)
    bd = params.block_dim
    low = [[1 if j == i else 0 for j in range(Lambda)] for i in range(bd)]
    bases = []
    for i in range(params.m):
        inter = intersect_subspaces(design.subspaces[i], low, F, Lambda)
        if not inter:
            raise EmptyBlock(f"H_{i} meets the degree < k polynomials only in 0")
        bases.append([row[:bd] for row in inter])
    eps = _frac(epsilon) if epsilon is not None else None
    return DesignPrecode(params, bases, design.A, eps, design.seed, design)


def precode_hse_build(params: CodeParams, zeta, alpha: int, seed: int = 0) -> HsePrecode:
    z = _frac(zeta)
    if not 0 < z < Fraction(1, 2):
        raise ParameterInfeasible(f"zeta must lie in (0, 1/2), got {z}")
    kappa = params.m * params.block_dim
    d = math.floor((1 - 2 * z) * kappa)
    if d < 1:
        raise ParameterInfeasible("pre-code domain is empty")
    warnings = hse_guard_warnings(params, z, alpha, d)
    F = _fr_field(params.r)
    rng = make_rng(seed)
    while True:
        G = [[int(x) for x in rng.integers(0, params.r, size=d)] for _ in range(kappa)]
        if rank(G, F) == d:
            break
    return HsePrecode(params, z, alpha, seed, G, d, warnings)


def hse_guard_warnings(params: CodeParams, z: Fraction, alpha: int, d: int) -> list[str]:
    """Violated size conditions of the list-size guarantee (reported, not enforced)."""
    kappa = params.m * params.block_dim
    warnings = []
    if params.m < (alpha + 1) / z:
        warnings.append(f"b = m = {params.m} < (alpha+1)/zeta = {float((alpha + 1) / z):g}")
    if not params.block_dim > 2 * params.s * (alpha + 2) / z:
        warnings.append(f"Lambda = {params.block_dim} <= 2s(alpha+2)/zeta = {float(2 * params.s * (alpha + 2) / z):g}")
    if d != (1 - 2 * z) * kappa:
        warnings.append(f"(1-2 zeta) kappa = {float((1 - 2 * z) * kappa):g} is not an integer; using {d}")
    return warnings


# -- filters ------------------------------------------------------------------------------

def _solve_combination(F: GF, groups: Sequence[Sequence[Sequence[int]]], target: Sequence[int], width: int):
    """Solve sum_g (coeffs_g . group_g) = target; columns are the vectors of
    every group, in order."""
    cols = [list(v) for g in groups for v in g]
    if not cols:
        return ([], []) if not any(target) else None
    A = [list(row) for row in zip(*cols)]
    return solve_affine(A, target, F, len(cols))


class DesignFilter:
    """Per block a: (offset + W) ∩ (H_a ∩ {degree < k}), solved linearly."""

    def __init__(self, precode: DesignPrecode):
        self.pc = precode
        self.F = precode.fr

    def root(self):
        return []

    def branch(self, state, a: int, v: Sequence[int], W: Sequence[Sequence[int]]):
        F = self.F
        B = self.pc.bases[a]
        negW = [[F.neg(x) for x in w] for w in W]
        sol = _solve_combination(F, [B, negW], v, len(v))
        if sol is None:
            return
        p, basis = sol
        nb = len(B)
        for coeffs in affine_points(F, p, basis):
            c = coeffs[:nb]
            yield _combine(F, [0] * len(v), B, c), state + [c]

    def leaf(self, state):
        return [x for c in state for x in c]

    def restrict_global(self, p: Sequence[int], basis: Sequence[Sequence[int]]):
        F = self.F
        bd = self.pc.params.block_dim
        m = self.pc.params.m
        groups = [basis]
        for a, B in enumerate(self.pc.bases[:m]):
            groups.append([[0] * (a * bd) + [F.neg(x) for x in row] + [0] * ((m - a - 1) * bd) for row in B])
        sol = _solve_combination(F, groups, [F.neg(x) for x in p], len(p))
        if sol is None:
            return
        sp, sb = sol
        nz = len(basis)
        for coeffs in affine_points(F, sp, sb):
            yield _combine(F, p, basis, coeffs[:nz]), coeffs[nz:]


class HseFilter:
    """Depth-first search constrained to the image of G: the state is the
    affine set of pre-images consistent with the blocks fixed so far."""

    def __init__(self, precode: HsePrecode):
        self.pc = precode
        self.F = precode.fr

    def root(self):
        d = self.pc.d
        return [0] * d, [[1 if j == i else 0 for j in range(d)] for i in range(d)]

    def _rows(self, a):
        bd = self.pc.params.block_dim
        return self.pc.G[a * bd:(a + 1) * bd]

    def branch(self, state, a: int, v: Sequence[int], W: Sequence[Sequence[int]]):
        F = self.F
        x0, X = state
        Ga = self._rows(a)
        gx0 = mat_vec(Ga, x0, F)
        GX = [mat_vec(Ga, xv, F) for xv in X]
        negW = [[F.neg(x) for x in w] for w in W]
        target = [F.sub(x, y) for x, y in zip(v, gx0)]
        sol = _solve_combination(F, [GX, negW], target, len(v))
        if sol is None:
            return
        p, basis = sol
        ny = len(X)
        # distinct block values come from distinct z = coeffs[ny:]
        zp = p[ny:]
        zb = rref([b[ny:] for b in basis if any(b[ny:])], F, len(W))[0] if W else []
        for z in affine_points(F, zp, zb):
            block = _combine(F, v, W, z)
            rhs = [F.sub(x, y) for x, y in zip(block, gx0)]
            ysol = _solve_combination(F, [GX], rhs, len(v))
            if ysol is None:
                continue
            y0, ykern = ysol
            nx0 = _combine(F, x0, X, y0)
            nX = [_combine(F, [0] * len(x0), X, kv) for kv in ykern]
            yield block, (nx0, nX)

    def leaf(self, state):
        x0, X = state
        return list(x0)

    def restrict_global(self, p: Sequence[int], basis: Sequence[Sequence[int]]):
        F = self.F
        cols_G = [list(col) for col in zip(*self.pc.G)]
        negB = [[F.neg(x) for x in b] for b in basis]
        sol = _solve_combination(F, [cols_G, negB], p, len(p))
        if sol is None:
            return
        sp, sb = sol
        d = self.pc.d
        for coeffs in affine_points(F, sp, sb):
            x = coeffs[:d]
            yield self.pc.apply(x), x


def precode_filter(precode, space):
    """The filter a pre-code contributes to list enumeration over ``space``."""
    return precode.make_filter(space.tower)


def pruned_design_dimension(precode: DesignPrecode, solution) -> int | None:
    """Dimension of (candidate space) ∩ (H_1 x ... x H_m) computed jointly;
    None when empty."""
    if solution is None:
        return None
    filt = DesignFilter(precode)
    F = filt.F
    bd = precode.params.block_dim
    m = precode.params.m
    groups = [solution.basis]
    for a, B in enumerate(precode.bases[:m]):
        groups.append([[0] * (a * bd) + [F.neg(x) for x in row] + [0] * ((m - a - 1) * bd) for row in B])
    sol = _solve_combination(F, groups, [F.neg(x) for x in solution.particular], len(solution.particular))
    if sol is None:
        return None
    nz = len(solution.basis)
    vecs = [b[:nz] for b in sol[1]]
    images = [_combine(F, [0] * len(solution.particular), solution.basis, c) for c in vecs]
    return rank(images, F) if images else 0
