"""Shared test utilities, including independent reference computations."""

from sympy import GF as SymGF
from sympy.polys.matrices import DomainMatrix

# filled by tests/test_acceptance.py, printed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def rank_mod_p(rows, p):
    """Rank over F_p computed by sympy, independent of the package's elimination."""
    if not rows or not rows[0]:
        return 0
    K = SymGF(p)
    return DomainMatrix([[K(x) for x in row] for row in rows], (len(rows), len(rows[0])), K).rank()


def synthetic_interpolation(params, tower, rng, f, step="kernel", e=0, tail_zero=False):
    """An interpolation polynomial whose identities are satisfied by ``f``.

    step="kernel" makes T(g) = g(x) - gamma^-1 g(gamma x), whose kernel over
    F_{q^n} is spanned by x (needs s >= 2, k >= 2); step="zero" makes T = 0;
    step="random" leaves the step coefficients random. ``tail_zero`` drops
    every A_{w,i} with i >= 1, so only the step equations constrain f."""
    from rankdec.decoder import CoefficientIdentities, InterpolationPoly

    F = tower.fqn
    r, n, m, k, s = params.r, params.n, params.m, params.k, params.s
    n0, n1 = n - e, n - e - m + 1
    Aw = [[F.random(rng, r - k) if not (tail_zero and i) else [0] * (r - k) for i in range(n1)]
          for _ in range(s)]
    if step == "kernel":
        assert s >= 2 and k >= 2
        for w in range(s):
            Aw[w][0] = [0] * (r - k)
        Aw[0][0][0] = 1
        Aw[1][0][0] = F.neg(F.inv(tower.gamma))
    elif step == "zero":
        for w in range(s):
            Aw[w][0] = [0] * (r - k)
    A0 = [[0] * (r - 1) for _ in range(n0)]
    Q = InterpolationPoly(A0, Aw, e)
    ids = CoefficientIdentities(Q, params, tower)
    Q.A0 = [[F.neg(c) for c in ids.residual(f.blocks, u)] for u in range(n0)]
    return Q
