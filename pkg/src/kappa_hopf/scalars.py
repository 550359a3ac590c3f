"""Exact coefficient arithmetic.

The whole engine runs on four nested coefficient domains:

    Fraction  ->  GaussianRational  ->  Poly  ->  RationalFn  ->  HSeries

* ``GaussianRational``: a + b*i with exact rational a, b.
* ``Poly``: multivariate polynomial in commuting symbols (strings) with
  GaussianRational coefficients, stored sparsely as {monomial: coeff}.
  The deformation symbol ``h`` is *never* a Poly symbol; powers of h are
  tracked by HSeries.
* ``RationalFn``: quotient of two Polys, gcd-reduced, denominator
  normalized so its leading coefficient (in a fixed monomial order) is 1.
* ``HSeries``: Laurent-style series sum_k c_k h^k with RationalFn
  coefficients.  ``truncation`` is None for exact values (no truncation
  ever happened) or the integer N such that terms beyond h^N were
  dropped.  Arithmetic propagates the minimum truncation order.

All values are immutable after construction.
"""

from __future__ import annotations

from fractions import Fraction

Rational = Fraction


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot coerce {x!r} to Fraction")


class GaussianRational:
    """Exact complex rational a + b*i."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _as_fraction(re))
        object.__setattr__(self, "im", _as_fraction(im))

    def __setattr__(self, *a):
        raise AttributeError("GaussianRational is immutable")

    # -- arithmetic -------------------------------------------------
    def __add__(self, other):
        other = as_gaussian(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-as_gaussian(other))

    def __rsub__(self, other):
        return as_gaussian(other) + (-self)

    def __mul__(self, other):
        other = as_gaussian(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm2(self):
        return self.re * self.re + self.im * self.im

    def inverse(self):
        n = self.norm2()
        if n == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * as_gaussian(other).inverse()

    def __rtruediv__(self, other):
        return as_gaussian(other) * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("GaussianRational powers must be non-negative ints")
        out = GR_ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- comparisons / hashing --------------------------------------
    def __eq__(self, other):
        try:
            other = as_gaussian(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        if not self.im:
            return _frac_str(self.re)
        if not self.re:
            return _imag_str(self.im)
        sign = "+" if self.im > 0 else "-"
        return f"({_frac_str(self.re)}{sign}{_imag_str(abs(self.im))})"


def _frac_str(q):
    return str(q)


def _imag_str(q):
    if q == 1:
        return "i"
    if q == -1:
        return "-i"
    return f"{q}*i"


GR_ZERO = GaussianRational(0)
GR_ONE = GaussianRational(1)
GR_I = GaussianRational(0, 1)


def as_gaussian(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    if isinstance(x, complex) and x.imag == int(x.imag) and x.real == int(x.real):
        return GaussianRational(int(x.real), int(x.imag))
    raise TypeError(f"cannot coerce {x!r} to GaussianRational")


# ---------------------------------------------------------------------------
# Poly: sparse multivariate polynomial over GaussianRational
# ---------------------------------------------------------------------------

# monomial = tuple of (symbol, exponent) pairs, symbols sorted, exponents > 0
MONOMIAL_ONE = ()


def _mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for s, e in m2:
        d[s] = d.get(s, 0) + e
    return tuple(sorted((s, e) for s, e in d.items() if e))


def _mono_degree(m):
    return sum(e for _, e in m)


class Poly:
    """Multivariate polynomial in commuting symbols, exact coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        # terms: dict {monomial: GaussianRational}, zero coeffs stripped
        t = {}
        if terms:
            for m, c in terms.items():
                c = as_gaussian(c)
                if c:
                    t[m] = c
        object.__setattr__(self, "terms", t)

    def __setattr__(self, *a):
        raise AttributeError("Poly is immutable")

    @staticmethod
    def const(c):
        c = as_gaussian(c)
        return Poly({MONOMIAL_ONE: c}) if c else POLY_ZERO

    @staticmethod
    def var(name, power=1):
        if name == "h":
            raise ValueError("'h' is the distinguished series symbol; use HSeries.h()")
        if power < 0:
            raise ValueError("Poly variables need non-negative powers")
        if power == 0:
            return POLY_ONE
        return Poly({((name, power),): GR_ONE})

    # -- queries ----------------------------------------------------
    def is_const(self):
        return not self.terms or (len(self.terms) == 1 and MONOMIAL_ONE in self.terms)

    def const_value(self):
        if not self.is_const():
            raise ValueError(f"not a constant: {self}")
        return self.terms.get(MONOMIAL_ONE, GR_ZERO)

    def symbols(self):
        out = set()
        for m in self.terms:
            for s, _ in m:
                out.add(s)
        return out

    def degree(self):
        if not self.terms:
            return -1
        return max(_mono_degree(m) for m in self.terms)

    def degree_in(self, sym):
        d = 0
        for m in self.terms:
            for s, e in m:
                if s == sym and e > d:
                    d = e
        return d

    # -- arithmetic -------------------------------------------------
    def __add__(self, other):
        other = as_poly(other)
        if not self.terms:
            return other
        if not other.terms:
            return self
        t = dict(self.terms)
        for m, c in other.terms.items():
            nc = t.get(m, GR_ZERO) + c
            if nc:
                t[m] = nc
            else:
                t.pop(m, None)
        out = Poly.__new__(Poly)
        object.__setattr__(out, "terms", t)
        return out

    __radd__ = __add__

    def __neg__(self):
        out = Poly.__new__(Poly)
        object.__setattr__(out, "terms", {m: -c for m, c in self.terms.items()})
        return out

    def __sub__(self, other):
        return self + (-as_poly(other))

    def __rsub__(self, other):
        return as_poly(other) + (-self)

    def __mul__(self, other):
        other = as_poly(other)
        if not self.terms or not other.terms:
            return POLY_ZERO
        t = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                c = c1 * c2
                old = t.get(m)
                nc = c if old is None else old + c
                if nc:
                    t[m] = nc
                else:
                    t.pop(m, None)
        out = Poly.__new__(Poly)
        object.__setattr__(out, "terms", t)
        return out

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("Poly powers must be non-negative ints")
        out = POLY_ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale(self, c):
        c = as_gaussian(c)
        if not c:
            return POLY_ZERO
        out = Poly.__new__(Poly)
        object.__setattr__(out, "terms", {m: v * c for m, v in self.terms.items()})
        return out

    # -- calculus / substitution ------------------------------------
    def derivative(self, sym):
        t = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(sym, 0)
            if not e:
                continue
            if e == 1:
                del d[sym]
            else:
                d[sym] = e - 1
            mm = tuple(sorted(d.items()))
            t[mm] = t.get(mm, GR_ZERO) + c * e
        return Poly(t)

    def subs(self, mapping):
        """Substitute symbols; values may be Poly, GaussianRational, Fraction, int."""
        out = POLY_ZERO
        for m, c in self.terms.items():
            term = Poly.const(c)
            for s, e in m:
                if s in mapping:
                    term = term * (as_poly(mapping[s]) ** e)
                else:
                    term = term * Poly.var(s, e)
            out = out + term
        return out

    def eval_gaussian(self, mapping):
        """Full evaluation to a GaussianRational; all symbols must be mapped."""
        total = GR_ZERO
        for m, c in self.terms.items():
            v = c
            for s, e in m:
                v = v * (as_gaussian(mapping[s]) ** e)
            total = total + v
        return total

    # -- comparisons ------------------------------------------------
    def __eq__(self, other):
        try:
            other = as_poly(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for m in sorted(self.terms, key=lambda m: (_mono_degree(m), m)):
            c = self.terms[m]
            factors = [f"{s}^{e}" if e > 1 else s for s, e in m]
            body = "*".join(factors)
            if not body:
                bits.append(str(c))
            elif c == GR_ONE:
                bits.append(body)
            elif c == -GR_ONE:
                bits.append(f"-{body}")
            else:
                bits.append(f"{c}*{body}")
        s = " + ".join(bits)
        return s.replace("+ -", "- ")

    # -- leading data in a fixed (grevlex-ish) order ------------------
    def _lead(self):
        key = max(self.terms, key=lambda m: (_mono_degree(m), m))
        return key, self.terms[key]


POLY_ZERO = Poly()
POLY_ONE = Poly({MONOMIAL_ONE: GR_ONE})


def as_poly(x):
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction, GaussianRational)):
        return Poly.const(x)
    raise TypeError(f"cannot coerce {x!r} to Poly")


# ---------------------------------------------------------------------------
# multivariate gcd (primitive PRS, recursing on the symbol set)
# ---------------------------------------------------------------------------


def _poly_to_univariate(p, sym):
    """View p as dense coefficient list in sym: [c0, c1, ...] with Poly coeffs."""
    deg = p.degree_in(sym)
    coeffs = [POLY_ZERO] * (deg + 1)
    for m, c in p.terms.items():
        d = dict(m)
        e = d.pop(sym, 0)
        rest = tuple(sorted(d.items()))
        coeffs[e] = coeffs[e] + Poly({rest: c})
    return coeffs


def _univariate_to_poly(coeffs, sym):
    out = POLY_ZERO
    for e, c in enumerate(coeffs):
        if c:
            out = out + c * Poly.var(sym, e)
    return out


def _uni_degree(coeffs):
    for i in range(len(coeffs) - 1, -1, -1):
        if coeffs[i]:
            return i
    return -1


def _uni_prem(a, b, sym_order):
    """Pseudo-remainder of dense Poly-coefficient lists a by b."""
    a = list(a)
    da, db = _uni_degree(a), _uni_degree(b)
    lb = b[db]
    while da >= db >= 0:
        la = a[da]
        # a := lb*a - la*x^(da-db)*b
        a = [lb * x for x in a]
        shift = da - db
        for i in range(db + 1):
            a[i + shift] = a[i + shift] - la * b[i]
        nda = _uni_degree(a)
        if nda == da:  # defensive; lead must drop
            raise ArithmeticError("pseudo-remainder failed to reduce degree")
        da = nda
    return a[: da + 1] if da >= 0 else []

def _content(p, symbols):
    """gcd of the coefficients of p viewed in symbols[0]."""
    coeffs = _poly_to_univariate(p, symbols[0])
    cs = [c for c in coeffs if c]
    g = cs[0]
    for c in cs[1:]:
        g = poly_gcd(g, c)
        if g.is_const():
            break
    return g


def poly_gcd(a, b):
    """gcd of two Polys, monic-normalized in the fixed monomial order.

    Denominators occurring in this engine are small (powers of the mass
    symbol, 1 + h-corrections), so a primitive PRS is plenty.
    """
    a, b = as_poly(a), as_poly(b)
    if not a:
        return _monic(b)
    if not b:
        return _monic(a)
    if a.is_const() or b.is_const():
        return POLY_ONE
    syms = sorted(a.symbols() | b.symbols())
    return _monic(_gcd_rec(a, b, syms))


def _gcd_rec(a, b, syms):
    if not a:
        return b
    if not b:
        return a
    if a.is_const() or b.is_const():
        return POLY_ONE
    sym = syms[0]
    da, db = a.degree_in(sym), b.degree_in(sym)
    if da == 0 and db == 0:
        return _gcd_rec(a, b, syms[1:])
    ca, cb = _content(a, syms), _content(b, syms)
    cont = _gcd_rec(ca, cb, syms[1:]) if not (ca.is_const() and cb.is_const()) else POLY_ONE
    pa = poly_exact_div(a, ca)
    pb = poly_exact_div(b, cb)
    ua = _poly_to_univariate(pa, sym)
    ub = _poly_to_univariate(pb, sym)
    if _uni_degree(ua) < _uni_degree(ub):
        ua, ub = ub, ua
    while True:
        dub = _uni_degree(ub)
        if dub < 0:
            g = _univariate_to_poly(ua, sym)
            break
        if dub == 0:
            g = POLY_ONE
            break
        r = _uni_prem(ua, ub, syms)
        ua, ub = ub, r
        if ub:
            # primitive part to tame growth
            p = _univariate_to_poly(ub, sym)
            c = _content(p, [sym] + syms)
            p = poly_exact_div(p, c)
            ub = _poly_to_univariate(p, sym)
    gp = g
    c = _content(gp, [sym] + syms) if not gp.is_const() else POLY_ONE
    gp = poly_exact_div(gp, c)
    return cont * gp


def poly_exact_div(a, b):
    """Exact division a / b; raises if not divisible."""
    a, b = as_poly(a), as_poly(b)
    if not b:
        raise ZeroDivisionError("Poly division by zero")
    if b.is_const():
        inv = b.const_value().inverse()
        return a.scale(inv)
    rem = a
    quot = POLY_ZERO
    bl_m, bl_c = b._lead()
    bl_c_inv = bl_c.inverse()
    while rem:
        rl_m, rl_c = rem._lead()
        # divide monomials
        d = dict(rl_m)
        ok = True
        for s, e in bl_m:
            ne = d.get(s, 0) - e
            if ne < 0:
                ok = False
                break
            if ne == 0:
                d.pop(s, None)
            else:
                d[s] = ne
        if not ok:
            raise ArithmeticError(f"inexact Poly division: {a} / {b}")
        qm = tuple(sorted(d.items()))
        qc = rl_c * bl_c_inv
        qterm = Poly({qm: qc})
        quot = quot + qterm
        rem = rem - qterm * b
    return quot


def _monic(p):
    if not p:
        return p
    _, lc = p._lead()
    return p.scale(lc.inverse())


# ---------------------------------------------------------------------------
# RationalFn
# ---------------------------------------------------------------------------


class RationalFn:
    """Quotient of Polys, canonicalized (gcd-reduced, monic denominator)."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=POLY_ONE):
        num, den = as_poly(num), as_poly(den)
        if not den:
            raise ZeroDivisionError("RationalFn with zero denominator")
        if not num:
            den = POLY_ONE
        elif den.is_const():
            num = num.scale(den.const_value().inverse())
            den = POLY_ONE
        else:
            g = poly_gcd(num, den)
            if not g.is_const():
                num = poly_exact_div(num, g)
                den = poly_exact_div(den, g)
            _, lc = den._lead()
            if lc != GR_ONE:
                inv = lc.inverse()
                num = num.scale(inv)
                den = den.scale(inv)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("RationalFn is immutable")

    # -- arithmetic -------------------------------------------------
    def __add__(self, other):
        other = as_rationalfn(other)
        if self.den == other.den:
            return RationalFn(self.num + other.num, self.den)
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        out = RationalFn.__new__(RationalFn)
        object.__setattr__(out, "num", -self.num)
        object.__setattr__(out, "den", self.den)
        return out

    def __sub__(self, other):
        return self + (-as_rationalfn(other))

    def __rsub__(self, other):
        return as_rationalfn(other) + (-self)

    def __mul__(self, other):
        other = as_rationalfn(other)
        return RationalFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_rationalfn(other)
        if not other.num:
            raise ZeroDivisionError("RationalFn division by zero")
        return RationalFn(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return as_rationalfn(other) / self

    def __pow__(self, n):
        if n < 0:
            return (RFN_ONE / self) ** (-n)
        return RationalFn(self.num ** n, self.den ** n)

    def scale(self, c):
        out = RationalFn.__new__(RationalFn)
        c = as_gaussian(c)
        if not c:
            return RFN_ZERO
        object.__setattr__(out, "num", self.num.scale(c))
        object.__setattr__(out, "den", self.den)
        return out

    # -- structure ----------------------------------------------------
    def is_poly(self):
        return self.den == POLY_ONE

    def as_poly(self):
        if not self.is_poly():
            raise ValueError(f"not polynomial: {self}")
        return self.num

    def is_const(self):
        return self.is_poly() and self.num.is_const()

    def const_value(self):
        return self.as_poly().const_value()

    def symbols(self):
        return self.num.symbols() | self.den.symbols()

    def derivative(self, sym):
        return RationalFn(
            self.num.derivative(sym) * self.den - self.num * self.den.derivative(sym),
            self.den * self.den,
        )

    def subs(self, mapping):
        num = self.num.subs(mapping)
        den = self.den.subs(mapping)
        return RationalFn(num, den)

    def eval_gaussian(self, mapping):
        d = self.den.eval_gaussian(mapping)
        if not d:
            raise ZeroDivisionError("denominator vanished at sample point")
        return self.num.eval_gaussian(mapping) / d

    # -- comparisons: cross-multiplication ---------------------------
    def __eq__(self, other):
        try:
            other = as_rationalfn(other)
        except TypeError:
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return bool(self.num)

    def __repr__(self):
        return f"RationalFn({self})"

    def __str__(self):
        if self.den == POLY_ONE:
            return str(self.num)
        return f"({self.num})/({self.den})"


RFN_ZERO = RationalFn(POLY_ZERO)
RFN_ONE = RationalFn(POLY_ONE)


def as_rationalfn(x):
    if isinstance(x, RationalFn):
        return x
    if isinstance(x, (int, Fraction, GaussianRational, Poly)):
        return RationalFn(as_poly(x))
    raise TypeError(f"cannot coerce {x!r} to RationalFn")


# ---------------------------------------------------------------------------
# HSeries: Laurent series in the deformation symbol h = 1/kappa
# ---------------------------------------------------------------------------


class HSeries:
    """sum_k coeff[k] * h^k with RationalFn coefficients.

    truncation is None when the value is exact (a finite h-polynomial no
    truncation ever touched), otherwise the order N through which the
    series is trusted.  Terms beyond the truncation are never stored.
    """

    __slots__ = ("coeffs", "truncation")

    def __init__(self, coeffs=None, truncation=None):
        c = {}
        if coeffs:
            for k, v in coeffs.items():
                v = as_rationalfn(v)
                if v:
                    if truncation is not None and k > truncation:
                        continue
                    c[k] = v
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "truncation", truncation)

    def __setattr__(self, *a):
        raise AttributeError("HSeries is immutable")

    @staticmethod
    def const(c):
        c = as_rationalfn(c)
        return HSeries({0: c}) if c else H_ZERO

    @staticmethod
    def h(power=1):
        return HSeries({power: RFN_ONE})

    # -- structure ----------------------------------------------------
    def is_exact(self):
        return self.truncation is None

    def min_power(self):
        return min(self.coeffs) if self.coeffs else None

    def max_power(self):
        return max(self.coeffs) if self.coeffs else None

    def coeff(self, k):
        return self.coeffs.get(k, RFN_ZERO)

    def constant_term(self):
        return self.coeffs.get(0, RFN_ZERO)

    def has_negative_powers(self):
        return any(k < 0 for k in self.coeffs)

    def symbols(self):
        out = set()
        for v in self.coeffs.values():
            out |= v.symbols()
        return out

    @staticmethod
    def _join(t1, t2):
        if t1 is None:
            return t2
        if t2 is None:
            return t1
        return min(t1, t2)

    def truncate(self, order):
        t = self.truncation if self.truncation is not None and self.truncation < order else order
        return HSeries({k: v for k, v in self.coeffs.items() if k <= t}, t)

    # -- arithmetic -------------------------------------------------
    def __add__(self, other):
        other = as_hseries(other)
        t = self._join(self.truncation, other.truncation)
        c = dict(self.coeffs)
        for k, v in other.coeffs.items():
            nv = c.get(k, RFN_ZERO) + v
            if nv:
                c[k] = nv
            else:
                c.pop(k, None)
        if t is not None:
            c = {k: v for k, v in c.items() if k <= t}
        out = HSeries.__new__(HSeries)
        object.__setattr__(out, "coeffs", c)
        object.__setattr__(out, "truncation", t)
        return out

    __radd__ = __add__

    def __neg__(self):
        out = HSeries.__new__(HSeries)
        object.__setattr__(out, "coeffs", {k: -v for k, v in self.coeffs.items()})
        object.__setattr__(out, "truncation", self.truncation)
        return out

    def __sub__(self, other):
        return self + (-as_hseries(other))

    def __rsub__(self, other):
        return as_hseries(other) + (-self)

    def __mul__(self, other):
        other = as_hseries(other)
        t = self._join(self.truncation, other.truncation)
        c = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                k = k1 + k2
                if t is not None and k > t:
                    continue
                v = v1 * v2
                old = c.get(k)
                nv = v if old is None else old + v
                if nv:
                    c[k] = nv
                else:
                    c.pop(k, None)
        out = HSeries.__new__(HSeries)
        object.__setattr__(out, "coeffs", c)
        object.__setattr__(out, "truncation", t)
        return out

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("HSeries powers must be non-negative ints")
        out = H_ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __truediv__(self, other):
        other = as_hseries(other)
        ks = list(other.coeffs)
        if len(ks) == 1:
            k = ks[0]
            inv = HSeries({-k: RFN_ONE / other.coeffs[k]}, other.truncation)
            return self * inv
        raise ArithmeticError("HSeries division only by h-monomials; expand instead")

    def scale(self, c):
        c = as_rationalfn(c)
        if not c:
            return HSeries({}, self.truncation)
        out = HSeries.__new__(HSeries)
        object.__setattr__(out, "coeffs", {k: v * c for k, v in self.coeffs.items()})
        object.__setattr__(out, "truncation", self.truncation)
        return out

    def subs(self, mapping):
        return HSeries({k: v.subs(mapping) for k, v in self.coeffs.items()}, self.truncation)

    def eval_gaussian(self, mapping, h_value):
        """Exact evaluation at rational h and symbol values (prefilter duty)."""
        h = as_gaussian(h_value)
        total = GR_ZERO
        for k, v in self.coeffs.items():
            hv = h ** k if k >= 0 else (GR_ONE / h) ** (-k)
            total = total + v.eval_gaussian(mapping) * hv
        return total

    # -- comparisons ------------------------------------------------
    def __eq__(self, other):
        try:
            other = as_hseries(other)
        except TypeError:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        return f"HSeries({self})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for k in sorted(self.coeffs):
            v = self.coeffs[k]
            vs = str(v)
            needs_par = ("+" in vs[1:]) or ("-" in vs[1:]) or "/" in vs
            if k == 0:
                bits.append(f"({vs})" if needs_par else vs)
            else:
                hpow = "h" if k == 1 else f"h^{k}"
                if vs == "1":
                    bits.append(hpow)
                elif vs == "-1":
                    bits.append(f"-{hpow}")
                else:
                    bits.append(f"({vs})*{hpow}" if needs_par else f"{vs}*{hpow}")
        return " + ".join(bits).replace("+ -", "- ")


H_ZERO = HSeries()
H_ONE = HSeries({0: RFN_ONE})
H_I = HSeries({0: RationalFn(Poly.const(GR_I))})


def as_hseries(x):
    if isinstance(x, HSeries):
        return x
    if isinstance(x, (int, Fraction, GaussianRational, Poly, RationalFn)):
        return HSeries.const(as_rationalfn(x))
    raise TypeError(f"cannot coerce {x!r} to HSeries")


# ---------------------------------------------------------------------------
# series utilities
# ---------------------------------------------------------------------------


class SeriesDomainError(ValueError):
    """Argument outside a series operation's domain (nonzero constant term)."""


def series_log1p(x, order):
    """log(1 + x) = sum_{k>=1} (-1)^(k+1) x^k / k through h^order.

    x must vanish at h = 0 (no constant term); exponentials and logs with
    O(1) arguments belong to the projective-representation layer, never here.
    """
    x = as_hseries(x)
    if not isinstance(order, int) or order < 1:
        raise ValueError(f"series_log1p order must be >= 1, got {order!r}")
    if x.constant_term() or (x.min_power() is not None and x.min_power() < 0):
        raise SeriesDomainError("series_log1p needs an argument with no h^0 term")
    x = x.truncate(order)
    out = H_ZERO.truncate(order)
    power = H_ONE.truncate(order)
    for k in range(1, order + 1):
        power = (power * x).truncate(order)
        if not power:
            break
        out = out + power.scale(Fraction((-1) ** (k + 1), k))
    return out


def series_exp(x, order):
    """exp(x) = sum x^k / k! through h^order; x must have no h^0 term."""
    x = as_hseries(x)
    if not isinstance(order, int) or order < 0:
        raise ValueError(f"series_exp order must be >= 0, got {order!r}")
    if x.constant_term() or (x.min_power() is not None and x.min_power() < 0):
        raise SeriesDomainError("series_exp needs an argument with no h^0 term")
    x = x.truncate(order)
    out = H_ONE.truncate(order)
    power = H_ONE.truncate(order)
    fact = 1
    for k in range(1, order + 1):
        power = (power * x).truncate(order)
        fact *= k
        if not power:
            break
        out = out + power.scale(Fraction(1, fact))
    return out


def series_inverse_one_plus(x, order):
    """1/(1+x) through h^order for x with no h^0 term (geometric series)."""
    x = as_hseries(x)
    if x.constant_term() or (x.min_power() is not None and x.min_power() < 0):
        raise SeriesDomainError("series_inverse_one_plus needs a vanishing h^0 term")
    x = x.truncate(order)
    out = H_ONE.truncate(order)
    power = H_ONE.truncate(order)
    for k in range(1, order + 1):
        power = (power * x).truncate(order)
        if not power:
            break
        out = out + power.scale(Fraction((-1) ** k))
    return out
