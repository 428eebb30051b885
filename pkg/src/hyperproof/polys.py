"""Sparse multivariate polynomials and rational functions over exact rationals.

Coefficients are arbitrary-precision rationals (`fractions.Fraction`), stored
as plain ints whenever the denominator is 1.  No floating point anywhere.
The monomial order is graded lexicographic over a fixed variable tuple.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _igcd

BigRational = Fraction


def _norm_coef(c):
    """Prefer plain ints over integral Fractions (much faster arithmetic)."""
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _as_fraction(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


class MultiPoly:
    """Sparse polynomial: map from exponent tuples to nonzero coefficients."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars: tuple, terms: dict):
        # Takes ownership of `terms`; callers must not pass zero coefficients.
        self.vars = vars
        self.terms = terms

    # -- construction -----------------------------------------------------

    @classmethod
    def zero(cls, vars):
        return cls(tuple(vars), {})

    @classmethod
    def constant(cls, vars, c):
        vars = tuple(vars)
        c = _norm_coef(c)
        if c == 0:
            return cls(vars, {})
        return cls(vars, {(0,) * len(vars): c})

    @classmethod
    def variable(cls, vars, name):
        vars = tuple(vars)
        i = vars.index(name)
        exp = tuple(1 if j == i else 0 for j in range(len(vars)))
        return cls(vars, {exp: 1})

    @classmethod
    def from_terms(cls, vars, items):
        vars = tuple(vars)
        terms = {}
        for exp, c in items:
            c = _norm_coef(terms.get(exp, 0) + c)
            if c == 0:
                terms.pop(exp, None)
            else:
                terms[exp] = c
        return cls(vars, terms)

    def one_like(self):
        return MultiPoly.constant(self.vars, 1)

    # -- predicates --------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        if not self.terms:
            return True
        return len(self.terms) == 1 and not any(next(iter(self.terms)))

    def as_constant(self):
        if not self.terms:
            return 0
        (exp, c), = self.terms.items()
        if any(exp):
            raise ValueError("not a constant polynomial")
        return c

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash(self.key())

    def key(self):
        """Hashable canonical form (for use as a dict key)."""
        return (self.vars, tuple(sorted((e, _as_fraction(c)) for e, c in self.terms.items())))

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other):
        if self.vars != other.vars:
            raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")

    def __add__(self, other):
        self._check(other)
        terms = dict(self.terms)
        for exp, c in other.terms.items():
            s = _norm_coef(terms.get(exp, 0) + c)
            if s == 0:
                terms.pop(exp, None)
            else:
                terms[exp] = s
        return MultiPoly(self.vars, terms)

    def __neg__(self):
        return MultiPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                exp = tuple(x + y for x, y in zip(e1, e2))
                s = out.get(exp, 0) + c1 * c2
                if s == 0:
                    out.pop(exp, None)
                else:
                    out[exp] = s
        for exp in [e for e, c in out.items() if isinstance(c, Fraction)]:
            out[exp] = _norm_coef(out[exp])
            if out[exp] == 0:
                del out[exp]
        return MultiPoly(self.vars, out)

    def scale(self, c):
        c = _norm_coef(c)
        if c == 0:
            return MultiPoly.zero(self.vars)
        return MultiPoly(self.vars, {e: _norm_coef(v * c) for e, v in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = MultiPoly.constant(self.vars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- degrees and leading terms ------------------------------------------

    def degree(self, var) -> int:
        """Degree in one variable; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        i = self.vars.index(var)
        return max(e[i] for e in self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def leading_exponent(self):
        """Exponent of the graded-lex leading term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self.terms, key=lambda e: (sum(e), e))

    def leading_coeff(self):
        return self.terms[self.leading_exponent()]

    def leading_term_wrt(self, var):
        """Leading term w.r.t. one variable (ties broken by graded lex)."""
        if not self.terms:
            return MultiPoly.zero(self.vars)
        i = self.vars.index(var)
        d = max(e[i] for e in self.terms)
        exp = max((e for e in self.terms if e[i] == d), key=lambda e: (sum(e), e))
        return MultiPoly(self.vars, {exp: self.terms[exp]})

    # -- evaluation and substitution ------------------------------------------

    def eval(self, point: dict):
        """Full evaluation; every variable must be assigned."""
        missing = [v for v in self.vars if v not in point]
        if missing:
            raise ValueError(f"unassigned variables: {missing}")
        total = 0
        vals = [point[v] for v in self.vars]
        for exp, c in self.terms.items():
            t = c
            for v, e in zip(vals, exp):
                if e:
                    t *= v ** e
            total += t
        return _norm_coef(_as_fraction(total)) if total else 0

    def eval_partial(self, point: dict):
        """Substitute a subset of the variables; result keeps the full tuple."""
        out = {}
        vals = {self.vars.index(v): point[v] for v in point if v in self.vars}
        for exp, c in self.terms.items():
            t = c
            nexp = list(exp)
            for i, val in vals.items():
                if exp[i]:
                    t *= val ** exp[i]
                nexp[i] = 0
            nexp = tuple(nexp)
            s = out.get(nexp, 0) + t
            if s == 0:
                out.pop(nexp, None)
            else:
                out[nexp] = s
        return MultiPoly(self.vars, {e: _norm_coef(c) for e, c in out.items() if c != 0})

    def shift(self, var, delta):
        """Substitute var -> var + delta for a rational constant delta."""
        if delta == 0:
            return self
        i = self.vars.index(var)
        out = MultiPoly.zero(self.vars)
        # group by exponent in `var`, expand (var+delta)^e binomially
        from math import comb
        acc = {}
        for exp, c in self.terms.items():
            e = exp[i]
            base = exp[:i] + (0,) + exp[i + 1:]
            for t in range(e + 1):
                coef = c * comb(e, t) * (delta ** (e - t))
                nexp = base[:i] + (t,) + base[i + 1:]
                s = acc.get(nexp, 0) + coef
                if s == 0:
                    acc.pop(nexp, None)
                else:
                    acc[nexp] = s
        out.terms.update({e: _norm_coef(c) for e, c in acc.items() if c != 0})
        return out

    def subst_linear(self, var, poly: "MultiPoly"):
        """Substitute var -> poly (poly may itself mention var, e.g. k -> k+j)."""
        i = self.vars.index(var)
        by_deg = {}
        for exp, c in self.terms.items():
            by_deg.setdefault(exp[i], []).append((exp[:i] + (0,) + exp[i + 1:], c))
        if not by_deg:
            return MultiPoly.zero(self.vars)
        # Horner over descending degree in var, gap-aware
        result = MultiPoly.zero(self.vars)
        prev = None
        for d in sorted(by_deg, reverse=True):
            if prev is not None:
                result = result * (poly ** (prev - d))
            result = result + MultiPoly.from_terms(self.vars, by_deg[d])
            prev = d
        if prev:
            result = result * (poly ** prev)
        return result

    def restrict(self, vars):
        """Project onto a smaller variable tuple (dropped vars must not occur)."""
        vars = tuple(vars)
        idx = []
        for j, v in enumerate(self.vars):
            if v in vars:
                idx.append((vars.index(v), j))
            else:
                if any(e[j] for e in self.terms):
                    raise ValueError(f"variable {v} occurs, cannot drop")
        terms = {}
        for exp, c in self.terms.items():
            nexp = [0] * len(vars)
            for tgt, src in idx:
                nexp[tgt] = exp[src]
            terms[tuple(nexp)] = c
        return MultiPoly(vars, terms)

    def embed(self, vars):
        """Reinterpret over a larger variable tuple."""
        vars = tuple(vars)
        pos = [vars.index(v) for v in self.vars]
        terms = {}
        for exp, c in self.terms.items():
            nexp = [0] * len(vars)
            for p, e in zip(pos, exp):
                nexp[p] = e
            terms[tuple(nexp)] = c
        return MultiPoly(vars, terms)

    # -- content, division, univariate views --------------------------------

    def content(self) -> Fraction:
        """Positive rational content (gcd of coefficients); 0 for zero poly."""
        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            f = _as_fraction(c)
            num = _igcd(num, abs(f.numerator))
            den = den * f.denominator // _igcd(den, f.denominator)
        return Fraction(num, den)

    def primitive(self):
        """Return (scale, prim) with self = scale*prim, prim integer-primitive
        with positive graded-lex leading coefficient."""
        if not self.terms:
            return Fraction(1), self
        c = self.content()
        if self.leading_coeff() < 0:
            c = -c
        return c, self.scale(1 / c)

    def monic(self):
        """Divide by the graded-lex leading coefficient."""
        if not self.terms:
            return self
        return self.scale(Fraction(1, 1) / _as_fraction(self.leading_coeff()))

    def divexact(self, other: "MultiPoly") -> "MultiPoly":
        """Exact division; raises ValueError if the division has a remainder."""
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if other.is_constant():
            return self.scale(Fraction(1, 1) / _as_fraction(other.as_constant()))
        rem = self
        out = {}
        dlead = other.leading_exponent()
        dcoef = _as_fraction(other.terms[dlead])
        while rem.terms:
            rlead = rem.leading_exponent()
            qexp = tuple(a - b for a, b in zip(rlead, dlead))
            if any(e < 0 for e in qexp):
                raise ValueError("inexact polynomial division")
            qcoef = _norm_coef(_as_fraction(rem.terms[rlead]) / dcoef)
            out[qexp] = qcoef
            rem = rem - MultiPoly(self.vars, {qexp: qcoef}) * other
        return MultiPoly(self.vars, out)

    def to_univar(self, var):
        """Dense coefficient list in `var`; entries keep the full tuple."""
        i = self.vars.index(var)
        d = self.degree(var)
        coeffs = [MultiPoly.zero(self.vars) for _ in range(d + 1)]
        for exp, c in self.terms.items():
            nexp = exp[:i] + (0,) + exp[i + 1:]
            coeffs[exp[i]].terms[nexp] = _norm_coef(coeffs[exp[i]].terms.get(nexp, 0) + c)
        for p in coeffs:
            for e in [e for e, c in p.terms.items() if c == 0]:
                del p.terms[e]
        return coeffs

    @staticmethod
    def from_univar(var, coeffs):
        if not coeffs:
            raise ValueError("empty coefficient list")
        vars = coeffs[0].vars
        i = vars.index(var)
        terms = {}
        for d, p in enumerate(coeffs):
            for exp, c in p.terms.items():
                nexp = exp[:i] + (exp[i] + d,) + exp[i + 1:]
                terms[nexp] = c
        return MultiPoly(vars, terms)

    # -- rendering -----------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exp in sorted(self.terms, key=lambda e: (sum(e), e), reverse=True):
            c = self.terms[exp]
            mono = "*".join(
                f"{v}^{e}" if e > 1 else v
                for v, e in zip(self.vars, exp) if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
        s = " + ".join(parts).replace("+ -", "- ")
        return s

    def __repr__(self):
        return f"MultiPoly({self})"


def _univar_prem(u, v, var):
    """Pseudo-remainder of dense coefficient lists u, v (as from to_univar)."""
    m, n = len(u) - 1, len(v) - 1
    lead = v[n]
    r = list(u)
    for i in range(m - n, -1, -1):
        # scale r by lead then cancel coefficient of degree n+i
        top = r[n + i]
        if top.is_zero():
            continue
        r = [c * lead for c in r]
        for j in range(n + 1):
            r[i + j] = r[i + j] - top * v[j]
    while r and r[-1].is_zero():
        r.pop()
    return r


def _poly_list_gcd(polys):
    g = None
    for p in polys:
        if p.is_zero():
            continue
        g = p if g is None else poly_gcd(g, p)
        if g.is_constant():
            break
    if g is None:
        return None
    return g


def poly_gcd(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """Greatest common divisor, normalized to leading coefficient 1.

    Primitive-PRS scheme: recurse on the first variable present, split off
    contents, run a primitive pseudo-remainder sequence on the primitive parts.
    """
    if p.vars != q.vars:
        raise ValueError("operands must share one variable list")
    if p.is_zero():
        return q.monic()
    if q.is_zero():
        return p.monic()
    if p.is_constant() or q.is_constant():
        return MultiPoly.constant(p.vars, 1)
    var = next(v for v in p.vars if p.degree(v) > 0 or q.degree(v) > 0)
    pu, qu = p.to_univar(var), q.to_univar(var)
    if len(pu) == 1 or len(qu) == 1:
        # one operand free of var: gcd divides its coefficient content
        short, other = (pu, qu) if len(pu) == 1 else (qu, pu)
        c = _poly_list_gcd(short + other)
        return c.monic()
    cont_p = _poly_list_gcd(pu)
    cont_q = _poly_list_gcd(qu)
    cont = poly_gcd(cont_p, cont_q)
    pp = [c.divexact(cont_p) for c in pu]
    qp = [c.divexact(cont_q) for c in qu]
    a, b = (pp, qp) if len(pp) >= len(qp) else (qp, pp)
    while b:
        r = _univar_prem(a, b, var)
        if r:
            rc = _poly_list_gcd(r)
            r = [c.divexact(rc) for c in r]
        a, b = b, r
    cont_a = _poly_list_gcd(a)
    a = [c.divexact(cont_a) for c in a]
    g = MultiPoly.from_univar(var, a) * cont
    return g.monic()


def poly_lcm(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    if p.is_zero() or q.is_zero():
        return MultiPoly.zero(p.vars)
    return (p * q).divexact(poly_gcd(p, q)).monic()


class RationalFunction:
    """Quotient of polynomials, kept reduced with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly, reduce: bool = True):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.vars != den.vars:
            raise ValueError("numerator/denominator variable mismatch")
        if num.is_zero():
            den = MultiPoly.constant(num.vars, 1)
        elif reduce:
            g = poly_gcd(num, den)
            if not g.is_constant():
                num = num.divexact(g)
                den = den.divexact(g)
        if not den.is_constant() or den.as_constant() != 1:
            lc = _as_fraction(den.leading_coeff())
            if lc != 1:
                num = num.scale(1 / lc)
                den = den.scale(1 / lc)
        self.num = num
        self.den = den

    # -- construction ---------------------------------------------------------

    @classmethod
    def from_poly(cls, p: MultiPoly):
        return cls(p, MultiPoly.constant(p.vars, 1), reduce=False)

    @classmethod
    def constant(cls, vars, c):
        return cls.from_poly(MultiPoly.constant(vars, c))

    @classmethod
    def variable(cls, vars, name):
        return cls.from_poly(MultiPoly.variable(vars, name))

    @property
    def vars(self):
        return self.num.vars

    def is_zero(self):
        return self.num.is_zero()

    def is_constant(self):
        return self.num.is_constant() and self.den.is_constant()

    def as_constant(self):
        return _as_fraction(self.num.as_constant()) / _as_fraction(self.den.as_constant())

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num.key(), self.den.key()))

    # -- arithmetic -------------------------------------------------------------

    def __add__(self, other):
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other):
        return RationalFunction(
            self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduce=False)

    def __mul__(self, other):
        return RationalFunction(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RationalFunction(self.den, self.num)

    def shift(self, var, delta):
        return RationalFunction(self.num.shift(var, delta), self.den.shift(var, delta))

    def eval(self, point: dict):
        d = self.den.eval(point)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the point")
        return _norm_coef(_as_fraction(self.num.eval(point)) / _as_fraction(d))

    def eval_partial(self, point: dict):
        d = self.den.eval_partial(point)
        if d.is_zero():
            raise ZeroDivisionError("denominator vanishes under the substitution")
        return RationalFunction(self.num.eval_partial(point), d)

    def restrict(self, vars):
        return RationalFunction(self.num.restrict(vars), self.den.restrict(vars), reduce=False)

    def embed(self, vars):
        return RationalFunction(self.num.embed(vars), self.den.embed(vars), reduce=False)

    def __str__(self):
        if self.den.is_constant() and self.den.as_constant() == 1:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RationalFunction({self})"
