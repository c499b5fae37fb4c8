"""Folded rank-metric code: message space, encoder, rank distance and the
parameter formulas (rate, distance, error bound, decoding radius)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DegreeViolation, InvalidParameters, ShapeMismatch
from .fields import MessagePoly, Tower, TowerParams, build_tower, eval_bivariate
from .linalg import rank

# n x (r-1) arrays of F_{q^n} elements; both codewords and received words
Word = list[list[int]]
Codeword = Word
ReceivedWord = Word


@dataclass(frozen=True)
class CodeParams:
    r: int
    ell: int
    n: int
    m: int
    k: int
    s: int = 1

    def __post_init__(self):
        if not 1 <= self.k <= self.r - 1:
            raise InvalidParameters(f"need 1 <= k <= r-1, got k={self.k}, r={self.r}")
        if not 1 <= self.m <= self.n:
            raise InvalidParameters(f"need 1 <= m <= n, got m={self.m}, n={self.n}")
        if not 1 <= self.s <= self.r - 1:
            raise InvalidParameters(f"need 1 <= s <= r-1, got s={self.s}, r={self.r}")

    @property
    def tower_params(self) -> TowerParams:
        return TowerParams(self.r, self.ell, self.n)

    @property
    def q(self) -> int:
        return self.r ** self.ell

    @property
    def t(self) -> int:
        return (self.r - 1) * self.n

    @property
    def c(self) -> int:
        return self.r - self.k

    @property
    def block_dim(self) -> int:
        """F_r-dimension of one message block (a degree < k polynomial)."""
        return self.ell * self.n * self.k

    def tower(self) -> Tower:
        return build_tower(self.r, self.ell, self.n)


def check_message(params: CodeParams, f: MessagePoly) -> None:
    if len(f.blocks) != params.m:
        raise DegreeViolation(f"expected {params.m} blocks, got {len(f.blocks)}")
    for i, b in enumerate(f.blocks):
        # trailing zeros beyond k are tolerated, anything else is a degree violation
        if len(b) > params.k and any(b[params.k:]):
            raise DegreeViolation(f"block {i} has degree >= k={params.k}")
        if len(b) < params.k:
            raise DegreeViolation(f"block {i} has {len(b)} coefficients, expected {params.k}")


def encode(params: CodeParams, f: MessagePoly, tower: Tower | None = None) -> Codeword:
    """M_f: entry (i, j) is f(gamma^j, alpha_i)."""
    tower = tower or params.tower()
    check_message(params, f)
    f = MessagePoly(tuple(tuple(b[:params.k]) for b in f.blocks))
    xs = [tower.gamma_pow(j) for j in range(params.r - 1)]
    return [[eval_bivariate(tower, f, x, a) for x in xs] for a in tower.alpha]


def zero_word(params: CodeParams) -> Word:
    return [[0] * (params.r - 1) for _ in range(params.n)]


def fq_matrix(tower: Tower, word: Word) -> list[list[int]]:
    """The n x (r-1)n matrix over F_q: each entry expands to a row vector of
    its F_q-coordinates."""
    return [[c for entry in row for c in tower.fq_coords(entry)] for row in word]


def from_fq_matrix(tower: Tower, mat: Sequence[Sequence[int]]) -> Word:
    n = tower.n
    out = []
    for row in mat:
        if len(row) % n:
            raise ShapeMismatch(f"row length {len(row)} not a multiple of n={n}")
        out.append([tower.from_fq_coords(row[j:j + n]) for j in range(0, len(row), n)])
    return out


def word_add(tower: Tower, A: Word, B: Word) -> Word:
    F = tower.fqn
    return [[F.add(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def word_sub(tower: Tower, A: Word, B: Word) -> Word:
    F = tower.fqn
    return [[F.sub(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def word_rank(tower: Tower, A: Word) -> int:
    return rank(fq_matrix(tower, A), tower.fq)


def rank_distance(tower: Tower, A: Word, B: Word) -> int:
    if len(A) != len(B) or any(len(x) != len(y) for x, y in zip(A, B)):
        raise ShapeMismatch("words have different shapes")
    return word_rank(tower, word_sub(tower, A, B))


def message_add(tower: Tower, f: MessagePoly, g: MessagePoly) -> MessagePoly:
    F = tower.fqn
    return MessagePoly(tuple(tuple(F.add(a, b) for a, b in zip(x, y))
                             for x, y in zip(f.blocks, g.blocks)))


def random_message(params: CodeParams, rng) -> MessagePoly:
    Q = params.q ** params.n
    vals = [int(v) for v in rng.integers(0, Q, size=params.m * params.k)]
    return MessagePoly.from_flat(vals, params.m, params.k)


# -- parameter formulas --------------------------------------------------------

def interpolation_bound(params: CodeParams) -> Fraction:
    """s(r-k)(n-m+1) / (r-1+s(r-k)); interpolation needs e strictly below it."""
    sr = params.s * (params.r - params.k)
    return Fraction(sr * (params.n - params.m + 1), params.r - 1 + sr)


def max_errors(params: CodeParams) -> int:
    sr = params.s * (params.r - params.k)
    return (sr * (params.n - params.m + 1)) // (params.r - 1 + sr) - 1


@dataclass(frozen=True)
class DerivedParameters:
    rate: Fraction
    distance_bound: int
    e_max: int
    tau: Fraction
    unique_radius: int
    mrd: bool
    rho: Fraction
    tau_asymptotic: Fraction
    rate_limit: Fraction


def derive_parameters(params: CodeParams) -> DerivedParameters:
    r, n, m, k, s = params.r, params.n, params.m, params.k, params.s
    rate = Fraction(k, r - 1) * Fraction(m, n)
    d = n - m + 1
    e_max = max_errors(params)
    tau = Fraction(e_max, n)
    rho = Fraction(1, r - 1)
    sr = s * (r - k)
    tau_asym = Fraction(sr, r - 1 + sr) * (1 - rate * Fraction(r - 1, k))
    return DerivedParameters(
        rate=rate,
        distance_bound=d,
        e_max=e_max,
        tau=tau,
        unique_radius=(d - 1) // 2,
        mrd=(k == r - 1),
        rho=rho,
        tau_asymptotic=tau_asym,
        rate_limit=rate_limit(tau, rho),
    )


def rate_limit(tau: Fraction, rho: Fraction) -> Fraction:
    """Largest rate compatible with list decoding radius tau at ratio rho,
    (1 - tau)(1 - rho*tau)."""
    return (1 - tau) * (1 - rho * tau)


def tau_folded(R: Fraction, r: int, c: int) -> Fraction:
    """Radius with s = r-1 and k = r-c: c/(c+1) * (1 - (r-1)/(r-c) * R)."""
    return Fraction(c, c + 1) * (1 - Fraction(r - 1, r - c) * Fraction(R))


def unique_radius_fraction(R: Fraction) -> Fraction:
    return (1 - Fraction(R)) / 2


def crossover_rate(r: int, c: int) -> Fraction:
    return Fraction(r - c, r + c)
