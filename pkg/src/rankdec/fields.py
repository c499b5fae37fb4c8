"""Finite field tower F_p <= F_r <= F_q <= F_{q^n} and the residue field
F_{q^n}[x]/(x^{r-1} - gamma).

Every field element is a plain ``int`` holding its canonical encoding: an
element with coefficient vector (c_0, ..., c_{d-1}) over a base field of
order B is stored as sum(c_i * B**i), applied recursively down to F_p.
With that encoding a lower field embeds into a higher one as the same
integer, and F_r-coordinates of an F_{q^n} element are its base-r digits.

Fields small enough (order <= TABLE_LIMIT) get exp/log/Zech tables so that
multiplication, addition and Frobenius powers are a handful of array
lookups. Larger fields fall back to schoolbook vector arithmetic.
"""

from __future__ import annotations

import math
from array import array
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DivisionByZero, GcdViolation, InvalidParameters, NotPrimePower

TABLE_LIMIT = 1 << 25


def factor_prime_power(r: int) -> tuple[int, int]:
    """Return (p, e) with r == p**e, or raise NotPrimePower."""
    if r < 2:
        raise NotPrimePower(f"{r} is not a prime power")
    p = next((d for d in range(2, math.isqrt(r) + 1) if r % d == 0), r)
    e, t = 0, r
    while t % p == 0:
        t //= p
        e += 1
    if t != 1:
        raise NotPrimePower(f"{r} is not a prime power")
    return p, e


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


class GF:
    """A finite field: F_p when ``base`` is None, else base[X]/(modulus).

    ``modulus`` is the list of base-field coefficients of a monic
    irreducible polynomial, low degree first, leading 1 included.
    """

    def __init__(self, p: int, base: GF | None = None, modulus: Sequence[int] | None = None,
                 use_tables: bool = True):
        self.p = p
        self.base = base
        if base is None:
            self.degree = 1
            self.abs_degree = 1
            self.modulus = None
            self.order = p
        else:
            self.modulus = tuple(modulus)
            self.degree = len(self.modulus) - 1
            self.abs_degree = base.abs_degree * self.degree
            self.order = base.order ** self.degree
        self.is_prime = base is None
        self.tabulated = False
        if self.is_prime:
            self.add = self._add_p
            self.sub = self._sub_p
            self.neg = self._neg_p
            self.mul = self._mul_p
        else:
            self.add = self._add_v
            self.sub = self._sub_v
            self.neg = self._neg_v
            self.mul = self._mul_v
            if use_tables and self.order <= TABLE_LIMIT:
                self._build_tables()

    def __repr__(self):
        return f"GF({self.p}^{self.abs_degree})"

    # -- prime field ---------------------------------------------------
    def _add_p(self, a, b):
        return (a + b) % self.p

    def _sub_p(self, a, b):
        return (a - b) % self.p

    def _neg_p(self, a):
        return -a % self.p

    def _mul_p(self, a, b):
        return a * b % self.p

    # -- generic extension arithmetic ------------------------------------
    def to_vec(self, a: int) -> list[int]:
        """Coefficients over the immediate base field, low first."""
        B = self.base.order
        v = []
        for _ in range(self.degree):
            a, c = divmod(a, B)
            v.append(c)
        return v

    def from_vec(self, v: Sequence[int]) -> int:
        B = self.base.order
        a = 0
        for c in reversed(v):
            a = a * B + c
        return a

    def _add_v(self, a, b):
        F = self.base
        return self.from_vec([F.add(x, y) for x, y in zip(self.to_vec(a), self.to_vec(b))])

    def _sub_v(self, a, b):
        F = self.base
        return self.from_vec([F.sub(x, y) for x, y in zip(self.to_vec(a), self.to_vec(b))])

    def _neg_v(self, a):
        F = self.base
        return self.from_vec([F.neg(x) for x in self.to_vec(a)])

    def _mul_v(self, a, b):
        if a == 0 or b == 0:
            return 0
        F = self.base
        d = self.degree
        va, vb = self.to_vec(a), self.to_vec(b)
        prod = [0] * (2 * d - 1)
        for i, x in enumerate(va):
            if x:
                for j, y in enumerate(vb):
                    if y:
                        prod[i + j] = F.add(prod[i + j], F.mul(x, y))
        mod = self.modulus
        for i in range(2 * d - 2, d - 1, -1):
            c = prod[i]
            if c:
                for j in range(d):
                    if mod[j]:
                        prod[i - d + j] = F.sub(prod[i - d + j], F.mul(c, mod[j]))
        return self.from_vec(prod[:d])

    # -- tables ---------------------------------------------------------------
    def _build_tables(self):
        p, D, N = self.p, self.abs_degree, self.order
        nm1 = N - 1
        g = self._find_primitive()
        pw = p ** np.arange(D, dtype=np.int64)
        # column t: digits of g * p^t, i.e. multiplication-by-g over F_p
        A = np.array([_digits(self._mul_v(g, p ** t), p, D) for t in range(D)], dtype=np.float64)
        block = min(1 << 15, nm1)
        first = min(256, block)
        rows = np.zeros((block, D), dtype=np.float64)
        rows[0, 0] = 1.0
        for i in range(1, first):
            rows[i] = _fmod(rows[i - 1] @ A, p)
        # fill the rest of the first block by doubling
        filled = first
        while filled < block:
            take = min(filled, block - filled)
            rows[filled:filled + take] = _fmod(rows[:take] @ _matpow_mod(A, filled, p), p)
            filled += take
        step = _matpow_mod(A, block, p)
        fpw = pw.astype(np.float64)
        exp = np.empty(2 * nm1, dtype=np.int64)
        pos = 0
        while pos < nm1:
            take = min(block, nm1 - pos)
            exp[pos:pos + take] = (rows[:take] @ fpw).astype(np.int64)
            pos += take
            if pos < nm1:
                rows = _fmod(rows @ step, p)
        exp[nm1:] = exp[:nm1]
        log = np.full(N, -1, dtype=np.int64)
        log[exp[:nm1]] = np.arange(nm1, dtype=np.int64)
        v = exp[:nm1]
        d0 = v % p
        w = np.where(d0 == p - 1, v - (p - 1), v + 1)
        zech = np.where(w == 0, -1, log[w])
        self._exp = _to_array(exp)
        self._log = _to_array(log)
        self._zech = _to_array(zech)
        self._nm1 = nm1
        self._log_minus1 = 0 if p == 2 else nm1 // 2
        self.generator = g
        self.tabulated = True
        self.mul = self._mul_t
        self.neg = self._neg_t
        if p == 2:
            self.add = self._xor
            self.sub = self._xor
        else:
            self.add = self._add_t
            self.sub = self._sub_t

    def _find_primitive(self) -> int:
        nm1 = self.order - 1
        factors = _prime_factors(nm1)
        for g in range(2 if self.order > 2 else 1, self.order):
            if all(self._pow_generic(g, nm1 // f) != 1 for f in factors):
                return g
        raise AssertionError("no primitive element")  # pragma: no cover

    def _pow_generic(self, a, e):
        mul = self._mul_p if self.is_prime else self._mul_v
        result = 1
        while e:
            if e & 1:
                result = mul(result, a)
            a = mul(a, a)
            e >>= 1
        return result

    @staticmethod
    def _xor(a, b):
        return a ^ b

    def _mul_t(self, a, b):
        if a == 0 or b == 0:
            return 0
        L = self._log
        return self._exp[L[a] + L[b]]

    def _add_t(self, a, b):
        if a == 0:
            return b
        if b == 0:
            return a
        L = self._log
        la = L[a]
        z = self._zech[(L[b] - la) % self._nm1]
        if z < 0:
            return 0
        return self._exp[la + z]

    def _neg_t(self, a):
        if a == 0:
            return 0
        return self._exp[self._log[a] + self._log_minus1]

    def _sub_t(self, a, b):
        if b == 0:
            return a
        return self._add_t(a, self._exp[self._log[b] + self._log_minus1])

    # -- common ---------------------------------------------------------------
    def pow(self, a: int, e: int) -> int:
        if e == 0:
            return 1
        if a == 0:
            return 0
        if self.tabulated:
            return self._exp[self._log[a] * (e % self._nm1) % self._nm1]
        if self.is_prime:
            return pow(a, e % (self.p - 1), self.p)
        return self._pow_generic(a, e % (self.order - 1))

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        if self.tabulated:
            return self._exp[(-self._log[a]) % self._nm1]
        return self.pow(a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def is_primitive(self, a: int) -> bool:
        if a == 0:
            return False
        nm1 = self.order - 1
        return all(self.pow(a, nm1 // f) != 1 for f in _prime_factors(nm1)) if nm1 > 1 else a == 1

    def multiplicative_order(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("zero has no multiplicative order")
        n = self.order - 1
        for f in _prime_factors(n):
            while n % f == 0 and self.pow(a, n // f) == 1:
                n //= f
        return n

    def elements(self) -> range:
        return range(self.order)

    def random(self, rng, size=None):
        if size is None:
            return int(rng.integers(0, self.order))
        return [int(x) for x in rng.integers(0, self.order, size=size)]


def _digits(a: int, base: int, length: int) -> list[int]:
    out = []
    for _ in range(length):
        a, c = divmod(a, base)
        out.append(c)
    return out


def digits(a: int, base: int, length: int) -> list[int]:
    """Little-endian base-``base`` digits of ``a``, zero padded to ``length``."""
    return _digits(a, base, length)


def undigits(v: Iterable[int], base: int) -> int:
    a = 0
    for c in reversed(list(v)):
        a = a * base + c
    return a


def _fmod(x: np.ndarray, p: int) -> np.ndarray:
    # x holds small non-negative integers stored as floats
    return x - p * np.floor((x + 0.5) / p)


def _matpow_mod(A, e, p):
    R = np.eye(A.shape[0])
    while e:
        if e & 1:
            R = _fmod(R @ A, p)
        A = _fmod(A @ A, p)
        e >>= 1
    return R


def _to_array(x: np.ndarray) -> array:
    out = array("i")
    out.frombytes(x.astype(np.int32).tobytes())
    return out


# ---------------------------------------------------------------------------
# polynomials over a GF, coefficient lists low degree first

def poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_add(F: GF, a: Sequence[int], b: Sequence[int]) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = F.add(out[i], c)
    return out


def poly_sub(F: GF, a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, c in enumerate(b):
        out[i] = F.sub(out[i], c)
    return out


def poly_mul(F: GF, a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    mul, add = F.mul, F.add
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = add(out[i + j], mul(x, y))
    return out


def poly_scale(F: GF, a: Sequence[int], c: int) -> list[int]:
    return [F.mul(x, c) for x in a]


def poly_divmod(F: GF, a: Sequence[int], b: Sequence[int]) -> tuple[list[int], list[int]]:
    b = poly_trim(list(b))
    if not b:
        raise DivisionByZero("polynomial division by zero")
    r = poly_trim(list(a))
    inv_lead = F.inv(b[-1])
    db = len(b) - 1
    if len(r) <= db:
        return [], r
    q = [0] * (len(r) - db)
    while len(r) > db:
        c = F.mul(r[-1], inv_lead)
        shift = len(r) - 1 - db
        q[shift] = c
        for j in range(db + 1):
            r[shift + j] = F.sub(r[shift + j], F.mul(c, b[j]))
        poly_trim(r)
    return q, r


def poly_mod(F: GF, a, b):
    return poly_divmod(F, a, b)[1]


def poly_gcd(F: GF, a, b) -> list[int]:
    a, b = poly_trim(list(a)), poly_trim(list(b))
    while b:
        a, b = b, poly_mod(F, a, b)
    if a:
        a = poly_scale(F, a, F.inv(a[-1]))
    return a


def poly_powmod(F: GF, a, e: int, m) -> list[int]:
    result = [1]
    a = poly_mod(F, a, m)
    while e:
        if e & 1:
            result = poly_mod(F, poly_mul(F, result, a), m)
        a = poly_mod(F, poly_mul(F, a, a), m)
        e >>= 1
    return result


def poly_eval(F: GF, a: Sequence[int], x: int) -> int:
    y = 0
    for c in reversed(a):
        y = F.add(F.mul(y, x), c)
    return y


def is_irreducible(F: GF, f: Sequence[int]) -> bool:
    """Rabin's irreducibility test for a polynomial over F."""
    f = poly_trim(list(f))
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    Q = F.order
    x = [0, 1]

    def frob_iter(times):
        h = x
        for _ in range(times):
            h = poly_powmod(F, h, Q, f)
        return h

    if poly_trim(poly_sub(F, frob_iter(d), x)):
        return False
    for t in _prime_factors(d):
        g = poly_gcd(F, f, poly_sub(F, frob_iter(d // t), x))
        if len(g) > 1:
            return False
    return True


def smallest_irreducible(F: GF, degree: int) -> list[int]:
    """Monic irreducible of the given degree whose lower coefficients, read as
    a canonical integer over F, are smallest."""
    Q = F.order
    for c in range(Q ** degree):
        poly = _digits(c, Q, degree) + [1]
        if is_irreducible(F, poly):
            return poly
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


def extend(F: GF, degree: int, use_tables: bool = True) -> GF:
    """Canonical degree-``degree`` extension of F; degree 1 returns F itself."""
    if degree == 1:
        return F
    return GF(F.p, F, smallest_irreducible(F, degree), use_tables=use_tables)


@lru_cache(maxsize=None)
def _cached_extension(p: int, chain: tuple[int, ...]) -> GF:
    F = GF(p)
    for d in chain:
        F = extend(F, d)
    return F


def field_of_order(p: int, chain: tuple[int, ...]) -> GF:
    """F_p extended successively by the degrees in ``chain`` (cached)."""
    return _cached_extension(p, tuple(chain))


# ---------------------------------------------------------------------------
# tower

@dataclass(frozen=True)
class TowerParams:
    r: int
    ell: int
    n: int


class Tower:
    """The fields F_p, F_r, F_q = F_{r^ell}, F_{q^n} plus gamma and the basis
    alpha_1..alpha_n = 1, beta, ..., beta^{n-1} of F_{q^n} over F_q."""

    def __init__(self, params: TowerParams, fp: GF, fr: GF, fq: GF, fqn: GF, gamma: int):
        self.params = params
        self.r, self.ell, self.n = params.r, params.ell, params.n
        self.p = fp.p
        self.fp, self.fr, self.fq, self.fqn = fp, fr, fq, fqn
        self.q = fq.order
        self.Q = fqn.order
        self.gamma = gamma
        self.alpha = [self.q ** i for i in range(self.n)]
        self.residue = ResidueField(self)

    def __repr__(self):
        return f"Tower(r={self.r}, ell={self.ell}, n={self.n})"

    def frobenius(self, a: int, j: int) -> int:
        """a^(q^j) in F_{q^n}."""
        return self.fqn.pow(a, pow(self.q, j % self.n, self.Q - 1)) if a else 0

    def frobenius_r(self, a: int, j: int) -> int:
        """a^(r^j) in F_{q^n}."""
        return self.fqn.pow(a, pow(self.r, j % (self.ell * self.n), self.Q - 1)) if a else 0

    @property
    def vec_len(self) -> int:
        return self.ell * self.n

    def vectorize(self, a: int) -> list[int]:
        """F_r-coordinates (length ell*n) of an F_{q^n} element."""
        return _digits(a, self.r, self.ell * self.n)

    def devectorize(self, v: Sequence[int]) -> int:
        if len(v) != self.ell * self.n:
            raise InvalidParameters(f"expected {self.ell * self.n} coordinates, got {len(v)}")
        return undigits(v, self.r)

    def fq_coords(self, a: int) -> list[int]:
        """Coordinates over F_q (length n) in the basis alpha."""
        return _digits(a, self.q, self.n)

    def from_fq_coords(self, v: Sequence[int]) -> int:
        return undigits(v, self.q)

    def gamma_pow(self, j: int) -> int:
        return self.fr.pow(self.gamma, j % (self.r - 1))


def build_tower(r: int, ell: int, n: int) -> Tower:
    """Construct the canonical tower for (r, ell, n); cached per argument."""
    if ell < 1 or n < 1:
        raise InvalidParameters("ell and n must be positive")
    p, er = factor_prime_power(r)
    if math.gcd(r - 1, ell * n) != 1:
        raise GcdViolation(f"gcd(r-1, ell*n) = gcd({r - 1}, {ell * n}) != 1")
    return _build_tower(r, ell, n, p, er)


@lru_cache(maxsize=None)
def _build_tower(r, ell, n, p, er) -> Tower:
    fp = field_of_order(p, ())
    fr = field_of_order(p, (er,))
    fq = field_of_order(p, (er, ell))
    fqn = field_of_order(p, (er, ell, n))
    gamma = next(g for g in range(1, r) if fr.multiplicative_order(g) == r - 1)
    tower = Tower(TowerParams(r, ell, n), fp, fr, fq, fqn, gamma)
    if not is_irreducible(fqn, tower.residue.modulus):
        raise AssertionError("x^(r-1) - gamma is reducible over F_{q^n}")  # pragma: no cover
    return tower


# ---------------------------------------------------------------------------
# derived operations

def frobenius(tower: Tower, a: int, j: int) -> int:
    return tower.frobenius(a, j)


def coeff_twist(tower: Tower, g: Sequence[int], j: int) -> list[int]:
    """g^{(j)}: every coefficient raised to the q^j power."""
    return [tower.frobenius(c, j) for c in g]


def subst_scale(F: GF, g: Sequence[int], c: int) -> list[int]:
    """g(c*x) for a constant c."""
    out, t = [], 1
    for coef in g:
        out.append(F.mul(coef, t))
        t = F.mul(t, c)
    return out


@dataclass(frozen=True)
class LinearizedPoly:
    """sum_i coeffs[i] * y^(q^i)."""
    coeffs: tuple[int, ...]

    def __call__(self, tower: Tower, y: int) -> int:
        F = tower.fqn
        acc = 0
        for i, c in enumerate(self.coeffs):
            if c:
                acc = F.add(acc, F.mul(c, tower.frobenius(y, i)))
        return acc


@dataclass(frozen=True)
class BivariatePoly:
    """f(x, y) = sum_i blocks[i](x) * y^(q^i); a message polynomial when every
    block has length k."""
    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def zero(cls, m: int, k: int) -> BivariatePoly:
        return cls(tuple((0,) * k for _ in range(m)))

    @classmethod
    def from_flat(cls, values: Sequence[int], m: int, k: int) -> BivariatePoly:
        if len(values) != m * k:
            raise InvalidParameters(f"expected {m * k} coefficients, got {len(values)}")
        return cls(tuple(tuple(int(x) for x in values[i * k:(i + 1) * k]) for i in range(m)))

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def k(self) -> int:
        return len(self.blocks[0]) if self.blocks else 0

    def flat(self) -> list[int]:
        return [c for b in self.blocks for c in b]

    def is_zero(self) -> bool:
        return not any(self.flat())


MessagePoly = BivariatePoly


def eval_bivariate(tower: Tower, f: BivariatePoly, x0: int, y0: int) -> int:
    F = tower.fqn
    acc = 0
    for i, block in enumerate(f.blocks):
        c = poly_eval(F, block, x0)
        if c:
            acc = F.add(acc, F.mul(c, tower.frobenius(y0, i)))
    return acc


def vectorize(tower: Tower, a: int) -> list[int]:
    return tower.vectorize(a)


def devectorize(tower: Tower, v: Sequence[int]) -> int:
    return tower.devectorize(v)


class ResidueField:
    """F_{q^n}[x]/(x^{r-1} - gamma); elements are tuples of r-1 coefficients."""

    def __init__(self, tower: Tower):
        self.tower = tower
        self.F = tower.fqn
        self.d = tower.r - 1
        self.modulus = [self.F.neg(tower.gamma)] + [0] * (self.d - 1) + [1]

    def _reduce(self, a: Sequence[int]) -> tuple[int, ...]:
        F, d, g = self.F, self.d, self.tower.gamma
        out = list(a) + [0] * max(0, d - len(a))
        # x^d == gamma
        for i in range(len(out) - 1, d - 1, -1):
            c = out[i]
            if c:
                out[i - d] = F.add(out[i - d], F.mul(c, g))
        return tuple(out[:d])

    def element(self, coeffs: Sequence[int]) -> tuple[int, ...]:
        return self._reduce(coeffs)

    def zero(self):
        return (0,) * self.d

    def one(self):
        return (1,) + (0,) * (self.d - 1)

    def add(self, a, b):
        return tuple(self.F.add(x, y) for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(self.F.sub(x, y) for x, y in zip(a, b))

    def mul(self, a, b):
        return self._reduce(poly_mul(self.F, a, b))

    def inv(self, a):
        F = self.F
        if not any(a):
            raise DivisionByZero("inverse of zero in residue field")
        # extended Euclid: s*a + t*mod = g
        r0, r1 = poly_trim(list(self.modulus)), poly_trim(list(a))
        s0, s1 = [], [1]
        while r1:
            q, rem = poly_divmod(F, r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, poly_trim(poly_sub(F, s0, poly_mul(F, q, s1)))
        c = F.inv(r0[0])
        return self._reduce(poly_scale(F, s0, c))

    def subst_gamma_x(self, a):
        """z(x) -> z(gamma x)."""
        return tuple(subst_scale(self.F, a, self.tower.gamma))

    def random(self, rng):
        return tuple(self.F.random(rng) for _ in range(self.d))


def residue_op(tower: Tower, op: str, a, b=None):
    R = tower.residue
    if op == "add":
        return R.add(a, b)
    if op == "mul":
        return R.mul(a, b)
    if op == "inv":
        return R.inv(a)
    if op == "subst_gamma_x":
        return R.subst_gamma_x(a)
    raise InvalidParameters(f"unknown residue op {op!r}")
