"""Exact zero-testing modulo the R-orthogonality quotient.

The rotation coordinates R[i,j] of the quantum Galilei group commute with
each other, and the function algebra of E(3) carries the relations
R R^T = R^T R = I, which are sums of monomials and therefore not expressible
as digram rewrite rules.  Membership of a polynomial in the O(3) ideal is
decided exactly by substituting the rational Cayley parametrization

    R(x,y,z) = (I - A) (I + A)^{-1},   A = [[0,-z,y],[z,0,-x],[-y,x,0]]

(whose image is Zariski-dense in SO(3)) and its reflected copy
diag(-1,1,1) * R(x,y,z) (dense in the det = -1 component).  A polynomial
vanishes on both components iff it lies in the O(3) ideal (the ideal is
radical).  All arithmetic is exact; denominators are the single polynomial
D = 1 + x^2 + y^2 + z^2, tracked as explicit powers.
"""

from __future__ import annotations

from .scalars import Poly, POLY_ONE, POLY_ZERO
from .ncalg import normal_order


def _adjugate3(M):
    def det2(a, b, c, d):
        return a * d - b * c
    cof = [[None] * 3 for _ in range(3)]
    idx = [0, 1, 2]
    for i in range(3):
        for j in range(3):
            rows = [r for r in idx if r != i]
            cols = [c for c in idx if c != j]
            minor = det2(M[rows[0]][cols[0]], M[rows[0]][cols[1]],
                         M[rows[1]][cols[0]], M[rows[1]][cols[1]])
            cof[i][j] = minor if (i + j) % 2 == 0 else -minor
    return [[cof[j][i] for j in range(3)] for i in range(3)]  # transpose


def cayley_data(xname, yname, zname):
    """Numerator matrix N and denominator D with R = N / D on SO(3)."""
    x, y, z = Poly.var(xname), Poly.var(yname), Poly.var(zname)
    zero, one = POLY_ZERO, POLY_ONE
    A = [[zero, -z, y], [z, zero, -x], [-y, x, zero]]
    IpA = [[one + A[i][j] if i == j else A[i][j] for j in range(3)] for i in range(3)]
    ImA = [[one - A[i][j] if i == j else -A[i][j] for j in range(3)] for i in range(3)]
    adj = _adjugate3(IpA)
    N = [[sum((ImA[i][k] * adj[k][j] for k in range(3)), POLY_ZERO) for j in range(3)]
         for i in range(3)]
    D = one + x * x + y * y + z * z
    return N, D


def _rsym(slot, i, j):
    return f"_R{i}{j}@{slot}"


def strip_r_prefix(presentation, slot, word):
    """Split a normal-ordered slot word into (R-symbol Poly, remaining word)."""
    q = presentation.quotient
    rset = set(q.gen_indices.values()) if q else set()
    inv = {gi: ij for ij, gi in (q.gen_indices.items() if q else ())}
    sym = POLY_ONE
    rest = []
    for gi, p in word:
        if gi in rset:
            i, j = inv[gi]
            sym = sym * Poly.var(_rsym(slot, i, j), p)
        else:
            rest.append((gi, p))
    return sym, tuple(rest)


def _cayley_reduce_zero(poly, slots_with_r):
    """True iff `poly` (in _Rij@s symbols plus arbitrary others) lies in the
    per-slot O(3) ideals."""
    datas = {}
    for s in slots_with_r:
        datas[s] = cayley_data(f"_cx@{s}", f"_cy@{s}", f"_cz@{s}")
    # iterate over component choices (det = +1 / -1 per slot)
    slots = sorted(slots_with_r)
    for mask in range(1 << len(slots)):
        signs = {s: (-1 if (mask >> k) & 1 else 1) for k, s in enumerate(slots)}
        if not _substituted_is_zero(poly, datas, signs):
            return False
    return True


def _substituted_is_zero(poly, datas, signs):
    # maximum R-degree per slot fixes the cleared denominator power
    maxdeg = {s: 0 for s in datas}
    split_terms = []
    for mono, coeff in poly.terms.items():
        per_slot = {s: [] for s in datas}
        rest = []
        for symname, e in mono:
            if symname.startswith("_R") and "@" in symname:
                i = int(symname[2])
                j = int(symname[3])
                s = int(symname.split("@")[1])
                per_slot[s].append((i, j, e))
            else:
                rest.append((symname, e))
        degs = {s: sum(e for _, _, e in lst) for s, lst in per_slot.items()}
        for s in datas:
            maxdeg[s] = max(maxdeg[s], degs.get(s, 0))
        split_terms.append((coeff, per_slot, degs, tuple(rest)))
    total = POLY_ZERO
    for coeff, per_slot, degs, rest in split_terms:
        term = Poly({rest: coeff})
        for s, (N, D) in datas.items():
            for i, j, e in per_slot[s]:
                entry = N[i - 1][j - 1]
                if signs[s] < 0 and i == 1:
                    entry = -entry  # reflected component: first row negated
                term = term * (entry ** e)
            pad = maxdeg[s] - degs.get(s, 0)
            if pad:
                term = term * (D ** pad)
        total = total + term
    return not total


def zero_mod_quotient(element, budget=None):
    """Exact zero test of a normal-orderable element modulo any per-slot
    orthogonality quotients.  Without quotients this is plain exactness."""
    el = normal_order(element, budget=budget)
    if el.is_zero():
        return True
    ctx = el.context
    slots_with_r = [s for s, p in enumerate(ctx.slots) if p.quotient is not None]
    if not slots_with_r:
        return False
    buckets = {}
    for w, c in el.terms.items():
        sym = POLY_ONE
        rest_word = []
        for s, sw in enumerate(w):
            p = ctx.slots[s]
            if p.quotient is not None:
                sfac, rest = strip_r_prefix(p, s, sw)
                sym = sym * sfac
                rest_word.append(rest)
            else:
                rest_word.append(sw)
        key = tuple(rest_word)
        cur = buckets.get(key)
        contrib = c.scale(sym) if sym != POLY_ONE else c
        buckets[key] = contrib if cur is None else cur + contrib
    for series in buckets.values():
        for hc in series.coeffs.values():
            if not _cayley_reduce_zero(hc.num, slots_with_r):
                return False
    return True


def equal_mod_quotient(a, b, budget=None):
    return zero_mod_quotient(a - b, budget=budget)


# ---------------------------------------------------------------------------
# randomized exact substitution pre-filter
# ---------------------------------------------------------------------------


def _random_fraction(rng):
    from fractions import Fraction
    num = rng.randint(-99, 99)
    den = rng.randint(1, 17)
    return Fraction(num, den)


def _random_gaussian(rng):
    from .scalars import GaussianRational
    return GaussianRational(_random_fraction(rng), _random_fraction(rng))


def prefilter_zero(element, rng, retries=4):
    """Fast probabilistic zero test by exact random-rational substitution.

    Substitutes random rationals for every coefficient symbol (h included)
    and, for slots carrying the orthogonality quotient, random rational
    Cayley points for the rotation coordinates (both group components).
    False verdicts are always sound (a nonzero value was computed); a True
    verdict could in principle hit an unlucky root, which the suites count
    against the exact verdict (criterion: prefilters never disagree)."""
    el = normal_order(element)
    if el.is_zero():
        return True
    ctx = el.context
    slots_with_r = [s for s, p in enumerate(ctx.slots) if p.quotient is not None]
    syms = set()
    for c in el.terms.values():
        syms |= c.symbols()
    for attempt in range(retries):
        try:
            sample = {s: _random_fraction(rng) for s in syms}
            h_value = _random_fraction(rng)
            if h_value == 0:
                h_value += 1
            if not slots_with_r:
                for c in el.terms.values():
                    if c.eval_gaussian(sample, h_value):
                        return False
                return True
            # bucketed evaluation with random Cayley points per slot/component
            buckets = {}
            for w, c in el.terms.items():
                sym = POLY_ONE
                rest_word = []
                for s, sw in enumerate(w):
                    p = ctx.slots[s]
                    if p.quotient is not None:
                        sfac, rest = strip_r_prefix(p, s, sw)
                        sym = sym * sfac
                        rest_word.append(rest)
                    else:
                        rest_word.append(sw)
                key = tuple(rest_word)
                contrib = c.scale(sym) if sym != POLY_ONE else c
                cur = buckets.get(key)
                buckets[key] = contrib if cur is None else cur + contrib
            for signs_mask in range(1 << len(slots_with_r)):
                rsample = dict(sample)
                for k, s in enumerate(slots_with_r):
                    N, D = cayley_data("_x", "_y", "_z")
                    pt = {"_x": _random_fraction(rng), "_y": _random_fraction(rng),
                          "_z": _random_fraction(rng)}
                    dval = D.eval_gaussian(pt)
                    sign = -1 if (signs_mask >> k) & 1 else 1
                    for i in range(1, 4):
                        for j in range(1, 4):
                            val = N[i - 1][j - 1].eval_gaussian(pt) / dval
                            if sign < 0 and i == 1:
                                val = -val
                            rsample[_rsym(s, i, j)] = val
                for series in buckets.values():
                    if series.eval_gaussian(rsample, h_value):
                        return False
            return True
        except ZeroDivisionError:
            continue
    return el.is_zero()
