"""Proper hypergeometric terms: symbolic model, text parser, shift quotients,
exact evaluation (numeric and in the parameter field), and natural support.

A term is a product of factorials, binomials, rising factorials, constant-base
powers, and one rational-function factor, each argument affine in the declared
symbols.  rf(a,k) denotes a(a+1)...(a+k-1).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .polys import MultiPoly, RationalFunction, _as_fraction, _norm_coef


class TermError(ValueError):
    pass


class ParseError(TermError):
    def __init__(self, message, pos=None):
        self.pos = pos
        super().__init__(message if pos is None else f"{message} (at position {pos})")


class EvalError(TermError):
    pass


class _ZeroTerm(Exception):
    """Internal: a zero-convention factor (binomial with negative lower index,
    reciprocal factorial of a negative integer) makes the whole term zero."""


# ---------------------------------------------------------------------------
# linear forms


class LinearForm:
    """Affine combination of symbols with rational coefficients."""

    __slots__ = ("coeffs", "const")

    def __init__(self, coeffs=None, const=0):
        cs = {}
        for s, c in (coeffs or {}).items():
            c = _norm_coef(_as_fraction(c)) if not isinstance(c, int) else c
            if c != 0:
                cs[s] = c
        self.coeffs = cs
        self.const = _norm_coef(_as_fraction(const)) if not isinstance(const, int) else const

    @classmethod
    def symbol(cls, name):
        return cls({name: 1}, 0)

    @classmethod
    def number(cls, c):
        return cls({}, c)

    def __add__(self, other):
        cs = dict(self.coeffs)
        for s, c in other.coeffs.items():
            cs[s] = cs.get(s, 0) + c
        return LinearForm(cs, self.const + other.const)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        if c == 0:
            return LinearForm({}, 0)
        return LinearForm({s: v * c for s, v in self.coeffs.items()}, self.const * c)

    def add_const(self, c):
        return LinearForm(self.coeffs, self.const + c)

    def var_coeff(self, s):
        return self.coeffs.get(s, 0)

    def is_constant(self):
        return not self.coeffs

    def shift(self, var, delta):
        """Substitute var -> var + delta."""
        c = self.coeffs.get(var, 0)
        if c == 0 or delta == 0:
            return self
        return LinearForm(self.coeffs, self.const + c * delta)

    def substitute(self, point: dict):
        cs = {}
        const = self.const
        for s, c in self.coeffs.items():
            if s in point:
                const += c * point[s]
            else:
                cs[s] = c
        return LinearForm(cs, const)

    def eval(self, point: dict):
        v = self.substitute(point)
        if not v.is_constant():
            raise EvalError(f"unassigned symbols in {self}")
        return v.const

    def to_poly(self, vars) -> MultiPoly:
        items = [(tuple(1 if v == s else 0 for v in vars), c)
                 for s, c in self.coeffs.items()]
        if self.const != 0:
            items.append(((0,) * len(vars), self.const))
        return MultiPoly.from_terms(vars, items)

    def sort_key(self):
        return (tuple(sorted((s, _as_fraction(c)) for s, c in self.coeffs.items())),
                _as_fraction(self.const))

    def __eq__(self, other):
        if not isinstance(other, LinearForm):
            return NotImplemented
        return self.coeffs == other.coeffs and self.const == other.const

    def __hash__(self):
        return hash(self.sort_key())

    def __str__(self):
        parts = []
        for s in sorted(self.coeffs):
            c = self.coeffs[s]
            if c == 1:
                parts.append(f"+{s}" if parts else s)
            elif c == -1:
                parts.append(f"-{s}")
            else:
                cs = str(c) if c > 0 or not parts else str(c)
                parts.append(f"+{cs}*{s}" if parts and c > 0 else f"{cs}*{s}")
        if self.const != 0 or not parts:
            c = self.const
            parts.append(f"+{c}" if parts and c > 0 else str(c))
        return "".join(parts)

    def __repr__(self):
        return f"LinearForm({self})"


# ---------------------------------------------------------------------------
# term expressions


def _sorted_factors(lst, keyfn):
    return tuple(sorted(lst, key=keyfn))


@dataclass(frozen=True)
class TermExpression:
    """Product of special factors times a rational function.

    Factor lists hold (arguments..., exponent) with exponent +1 or -1;
    repeated factors appear as repeated entries.
    """
    symbols: tuple
    factorials: tuple = ()        # (arg: LinearForm, exp)
    binomials: tuple = ()         # (upper, lower, exp)
    risings: tuple = ()           # (base, count, exp)
    powers: tuple = ()            # (base: Fraction, exponent: LinearForm)
    rational: RationalFunction = None

    def __post_init__(self):
        object.__setattr__(self, "factorials", _sorted_factors(
            self.factorials, lambda f: (f[0].sort_key(), f[1])))
        object.__setattr__(self, "binomials", _sorted_factors(
            self.binomials, lambda f: (f[0].sort_key(), f[1].sort_key(), f[2])))
        object.__setattr__(self, "risings", _sorted_factors(
            self.risings, lambda f: (f[0].sort_key(), f[1].sort_key(), f[2])))
        object.__setattr__(self, "powers", _sorted_factors(
            self.powers, lambda f: (_as_fraction(f[0]), f[1].sort_key())))
        if self.rational is None:
            object.__setattr__(self, "rational", RationalFunction.constant(self.symbols, 1))

    @classmethod
    def one(cls, symbols):
        return cls(tuple(symbols))

    def is_zero(self):
        return self.rational.is_zero()

    def with_rational(self, rf: RationalFunction) -> "TermExpression":
        return TermExpression(self.symbols, self.factorials, self.binomials,
                              self.risings, self.powers, self.rational * rf)

    def times(self, other: "TermExpression") -> "TermExpression":
        if self.symbols != other.symbols:
            raise TermError("symbol lists differ")
        return TermExpression(
            self.symbols,
            self.factorials + other.factorials,
            self.binomials + other.binomials,
            self.risings + other.risings,
            self.powers + other.powers,
            self.rational * other.rational)

    def inverted(self) -> "TermExpression":
        return TermExpression(
            self.symbols,
            tuple((a, -e) for a, e in self.factorials),
            tuple((u, l, -e) for u, l, e in self.binomials),
            tuple((b, c, -e) for b, c, e in self.risings),
            tuple((b, e.scale(-1)) for b, e in self.powers),
            self.rational.inverse())

    def divided_by(self, other: "TermExpression") -> "TermExpression":
        return self.times(other.inverted())

    def shifted(self, var, delta) -> "TermExpression":
        return TermExpression(
            self.symbols,
            tuple((a.shift(var, delta), e) for a, e in self.factorials),
            tuple((u.shift(var, delta), l.shift(var, delta), e)
                  for u, l, e in self.binomials),
            tuple((b.shift(var, delta), c.shift(var, delta), e)
                  for b, c, e in self.risings),
            tuple((b, e.shift(var, delta)) for b, e in self.powers),
            self.rational.shift(var, delta))

    def substituted(self, point: dict) -> "TermExpression":
        """Specialize some symbols to rational constants."""
        remaining = tuple(s for s in self.symbols if s not in point)
        return TermExpression(
            remaining,
            tuple((a.substitute(point), e) for a, e in self.factorials),
            tuple((u.substitute(point), l.substitute(point), e)
                  for u, l, e in self.binomials),
            tuple((b.substitute(point), c.substitute(point), e)
                  for b, c, e in self.risings),
            tuple((b, e.substitute(point)) for b, e in self.powers),
            self.rational.eval_partial(point).restrict(remaining))

    # -- shift quotients ----------------------------------------------------

    def shift_ratio_parts(self, var, step=1):
        """Factored form of f(var+step)/f(var).

        Returns (const: Fraction, affine: list[(LinearForm, exp)],
        opaque: list[(MultiPoly, exp)]); the product of all parts with their
        exponents equals the shift quotient.  Raises on non-integer shifts of
        factorial-type count arguments.
        """
        const = Fraction(1)
        affine = []
        opaque = []

        def gamma_quotient(L: LinearForm, m):
            # Gamma(L+m)/Gamma(L) as affine factors
            if m != int(m):
                raise TermError(
                    f"shift in {var} changes factorial-type argument {L} "
                    f"by non-integer {m}")
            m = int(m)
            if m >= 0:
                return [(L.add_const(t), 1) for t in range(m)]
            return [(L.add_const(-t), -1) for t in range(1, -m + 1)]

        for a, e in self.factorials:
            m = a.var_coeff(var) * step
            for f, s in gamma_quotient(a.add_const(1), m):
                affine.append((f, s * e))
        for u, l, e in self.binomials:
            mu = u.var_coeff(var) * step
            ml = l.var_coeff(var) * step
            for f, s in gamma_quotient(u.add_const(1), mu):
                affine.append((f, s * e))
            for f, s in gamma_quotient(l.add_const(1), ml):
                affine.append((f, -s * e))
            for f, s in gamma_quotient((u - l).add_const(1), mu - ml):
                affine.append((f, -s * e))
        for b, c, e in self.risings:
            s_ = b.var_coeff(var) * step
            t_ = c.var_coeff(var) * step
            for f, sg in gamma_quotient(b + c, s_ + t_):
                affine.append((f, sg * e))
            for f, sg in gamma_quotient(b, s_):
                affine.append((f, -sg * e))
        for base, expo in self.powers:
            m = expo.var_coeff(var) * step
            if m != int(m):
                raise TermError(f"shift in {var} changes power exponent by non-integer")
            const *= _as_fraction(base) ** int(m)
        if not self.rational.is_constant():
            num, den = self.rational.num, self.rational.den
            if num.degree(var) > 0 or den.degree(var) > 0:
                ns = num.shift(var, step)
                ds = den.shift(var, step)
                if not num.is_constant():
                    opaque.append((ns, 1))
                    opaque.append((num, -1))
                if not den.is_constant():
                    opaque.append((den, 1))
                    opaque.append((ds, -1))
        return const, affine, opaque

    def __str__(self):
        return render(self)


def shift_quotient(f: TermExpression, var) -> RationalFunction:
    """f(var+1)/f(var) as a reduced rational function of all symbols."""
    if var not in f.symbols:
        raise TermError(f"{var} is not a symbol of the term")
    const, affine, opaque = f.shift_ratio_parts(var)
    vars = f.symbols
    num = MultiPoly.constant(vars, const)
    den = MultiPoly.constant(vars, 1)
    for L, e in affine:
        p = L.to_poly(vars)
        if e > 0:
            for _ in range(e):
                num = num * p
        else:
            for _ in range(-e):
                den = den * p
    for p, e in opaque:
        if e > 0:
            for _ in range(e):
                num = num * p
        else:
            for _ in range(-e):
                den = den * p
    return RationalFunction(num, den)


# ---------------------------------------------------------------------------
# evaluation


def _int_value(x, what):
    if isinstance(x, Fraction):
        if x.denominator != 1:
            raise EvalError(f"{what} is not an integer: {x}")
        return x.numerator
    return x


def _factorial(n):
    if n < 0:
        raise EvalError(f"factorial of negative integer {n}")
    from math import factorial
    return factorial(n)


def evaluate(f: TermExpression, point: dict,
             zero_conventions: bool = False) -> RationalFunction:
    """Exact value of f with some symbols assigned; symbolic in the rest.

    Count-type arguments (factorial arguments, binomial lower indices, rising
    factorial counts) must become nonnegative integers, except that factorials
    whose arguments stay symbolic may cancel in matched pairs (arguments with
    the same symbolic part and integer-spaced constants), in which case the
    pair contributes a finite rising-factorial product.

    With zero_conventions, a negative binomial lower index or a reciprocal
    factorial of a negative integer makes the term zero (raises _ZeroTerm for
    eval_summand to catch) instead of erroring.
    """
    remaining = tuple(s for s in f.symbols if s not in point)
    one = MultiPoly.constant(remaining, 1)
    num = one
    den = one
    value = Fraction(1)
    gammas = []  # (group key, symbolic part, constant, exponent)

    def mul(p: MultiPoly, e: int):
        nonlocal num, den
        if e > 0:
            for _ in range(e):
                num = num * p
        else:
            for _ in range(-e):
                den = den * p

    def mul_val(v, e: int):
        nonlocal value
        if v == 0 and e < 0:
            raise EvalError("division by a zero factor")
        value *= _as_fraction(v) ** e

    def rising_product(base: LinearForm, count: int, e: int):
        # (base)_count with count a nonnegative integer
        if count < 0:
            raise EvalError(f"negative rising-factorial count {count}")
        for t in range(count):
            a = base.add_const(t)
            if a.is_constant():
                mul_val(a.const, e)
            else:
                mul(a.to_poly(remaining), e)

    def push_factorial(arg: LinearForm, e: int):
        if arg.is_constant():
            n = _int_value(arg.const, "factorial argument")
            if n < 0:
                if e < 0 and zero_conventions:
                    raise _ZeroTerm  # 1/(negative)! = 0
                raise EvalError(f"factorial of negative integer {n}")
            mul_val(_factorial(n), e)
        else:
            sym = LinearForm(arg.coeffs, 0)
            c = _as_fraction(arg.const)
            frac = c - (c.numerator // c.denominator)  # floor residue mod 1
            key = (tuple(sorted((s, _as_fraction(v)) for s, v in sym.coeffs.items())),
                   frac)
            gammas.append((key, sym, c, e))

    for a, e in f.factorials:
        push_factorial(a.substitute(point), e)

    for u, l, e in f.binomials:
        uv = u.substitute(point)
        lv = l.substitute(point)
        if lv.is_constant():
            m = _int_value(lv.const, "binomial lower index")
            if m < 0:
                if zero_conventions and e > 0:
                    raise _ZeroTerm  # binomial(., negative) = 0
                raise EvalError(f"negative binomial lower index {m}")
            # binomial(x, m) = x(x-1)...(x-m+1)/m!
            for t in range(m):
                a = uv.add_const(-t)
                if a.is_constant():
                    mul_val(a.const, e)
                else:
                    mul(a.to_poly(remaining), e)
            mul_val(_factorial(m), -e)
        else:
            # symbolic lower index: fall back to factorial quotients
            push_factorial(uv, e)
            push_factorial(lv, -e)
            push_factorial(uv - lv, -e)

    for b, c, e in f.risings:
        bv = b.substitute(point)
        cv = c.substitute(point)
        if cv.is_constant():
            rising_product(bv, _int_value(cv.const, "rising-factorial count"), e)
        else:
            push_factorial((bv + cv).add_const(-1), e)
            push_factorial(bv.add_const(-1), -e)

    for base, expo in f.powers:
        ev = expo.substitute(point)
        if not ev.is_constant():
            raise EvalError(f"power exponent {ev} not fully assigned")
        m = _int_value(ev.const, "power exponent")
        mul_val(base, m)

    # cancel symbolic factorial groups pairwise
    groups = {}
    syms = {}
    for key, sym, const, e in gammas:
        groups.setdefault(key, []).append((const, e))
        syms[key] = sym
    for key, items in groups.items():
        pos = sorted(c for c, e in items for _ in range(max(e, 0)))
        neg = sorted(c for c, e in items for _ in range(max(-e, 0)))
        if len(pos) != len(neg):
            raise EvalError("symbolic factorial does not cancel; cannot evaluate")
        sym = syms[key]
        for cp, cn in zip(pos, neg):
            m = cp - cn  # integer by group construction
            if m >= 0:
                rising_product(sym.add_const(cn + 1), int(m), 1)
            else:
                rising_product(sym.add_const(cp + 1), int(-m), -1)

    try:
        rf = f.rational.eval_partial(point).restrict(remaining)
    except ZeroDivisionError as exc:
        raise EvalError(str(exc)) from exc
    return RationalFunction(num.scale(value), den) * rf


def eval_term(f: TermExpression, point: dict) -> Fraction:
    """Exact numeric value; every symbol must be assigned."""
    r = evaluate(f, point)
    if not r.is_constant():
        raise EvalError("point does not assign all symbols")
    return _as_fraction(r.as_constant())


def eval_summand(f: TermExpression, point: dict) -> RationalFunction:
    """Like evaluate, but zero-convention factors yield an exact zero.

    Used when summing over a window that may stick out of the natural support
    (binomial(., negative) = 0 and 1/(negative)! = 0 kill the whole term).
    """
    remaining = tuple(s for s in f.symbols if s not in point)
    try:
        return evaluate(f, point, zero_conventions=True)
    except _ZeroTerm:
        return RationalFunction.constant(remaining, 0)


# ---------------------------------------------------------------------------
# natural support


UNBOUNDED = None


def natural_support(f: TermExpression, point: dict, k="k"):
    """Smallest integer interval outside which f vanishes, or unbounded ends.

    Returns (lo, hi) where either end may be None (unbounded).  Zeros are the
    ones forced by binomial(., negative) = 0, binomial(m, j) = 0 for j > m with
    integer m >= 0, terminating rising factorials, and reciprocal factorials of
    negative integers.  An identically zero term reports (0, -1).
    """
    if f.is_zero():
        return (0, -1)
    unassigned = [s for s in f.symbols if s != k and s not in point]
    if unassigned:
        raise EvalError(f"natural support needs every symbol but {k} "
                        f"assigned; missing {unassigned}")
    los = []
    his = []

    def integer_valued(L: LinearForm):
        # value is an integer for every integer k
        a = L.var_coeff(k)
        return (isinstance(a, int) or a.denominator == 1) and \
            (isinstance(L.const, int) or _as_fraction(L.const).denominator == 1)

    def halfline(conds):
        """Intersect affine integer conditions; each cond is (L, op) meaning
        L(k) <= -1 for op '-' or L(k) >= 0 for op '+'.  Returns (lo, hi) of the
        zero region over the integers, or None if empty/not a half-line."""
        lo, hi = None, None  # None = infinite
        import math
        for L, op in conds:
            a = _as_fraction(L.var_coeff(k))
            b = _as_fraction(L.const)
            if op == "-":
                # a*k + b <= -1
                if a == 0:
                    if not b <= -1:
                        return "empty"
                elif a > 0:
                    bound = math.floor((-1 - b) / a)
                    hi = bound if hi is None else min(hi, bound)
                else:
                    bound = math.ceil((-1 - b) / a)
                    lo = bound if lo is None else max(lo, bound)
            else:
                # a*k + b >= 0
                if a == 0:
                    if not b >= 0:
                        return "empty"
                elif a > 0:
                    bound = math.ceil(-b / a)
                    lo = bound if lo is None else max(lo, bound)
                else:
                    bound = math.floor(-b / a)
                    hi = bound if hi is None else min(hi, bound)
        if lo is not None and hi is not None and lo > hi:
            return "empty"
        return (lo, hi)

    def add_zero_region(conds):
        region = halfline(conds)
        if region == "empty":
            return
        lo, hi = region
        if lo is None and hi is None:
            # zero everywhere: empty support
            los.append(("all", None))
        elif lo is None:
            # zero for k <= hi: support starts at hi+1
            los.append(("cut", hi + 1))
        elif hi is None:
            his.append(("cut", lo - 1))
        # a bounded interior zero region does not shrink the support interval

    for u, l, e in f.binomials:
        if e <= 0:
            continue
        uv = u.substitute(point)
        lv = l.substitute(point)
        if integer_valued(lv):
            add_zero_region([(lv, "-")])                    # lower index negative
            if integer_valued(uv):
                add_zero_region([(uv, "+"), (uv - lv, "-")])  # 0 <= upper < lower
    for b, c, e in f.risings:
        if e <= 0:
            continue
        bv = b.substitute(point)
        cv = c.substitute(point)
        if integer_valued(bv):
            # zero iff base <= 0 and base+count-1 >= 0
            add_zero_region([(bv.add_const(-1), "-"),
                             ((bv + cv).add_const(-1), "+")])
    for a, e in f.factorials:
        if e >= 0:
            continue
        av = a.substitute(point)
        if integer_valued(av):
            add_zero_region([(av, "-")])                    # 1/(negative)! = 0
    if any(tag == "all" for tag, _ in los):
        return (0, -1)
    lo = max((v for tag, v in los), default=UNBOUNDED)
    hi = min((v for tag, v in his), default=UNBOUNDED)
    if lo is not None and hi is not None and lo > hi:
        return (0, -1)
    return (lo, hi)


# ---------------------------------------------------------------------------
# parser


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^(),!]))")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            break
        if m.group(1):
            tokens.append(("num", int(m.group(1)), pos))
        elif m.group(2):
            tokens.append(("name", m.group(2), pos))
        else:
            op = m.group(3)
            tokens.append(("op", "^" if op == "**" else op, pos))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


# AST nodes: ("num", Fraction) ("sym", name) ("+", a, b) ("-", a, b)
# ("*", a, b) ("/", a, b) ("neg", a) ("pow", a, b) ("fact", a)
# ("call", fname, a, b)


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect_op(self, op):
        kind, val, pos = self.next()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)

    def parse_expr(self):
        node = self.parse_product()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                rhs = self.parse_product()
                node = (val, node, rhs)
            else:
                return node

    def parse_product(self):
        node = self.parse_unary()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "*/":
                self.next()
                rhs = self.parse_unary()
                node = (val, node, rhs)
            else:
                return node

    def parse_unary(self):
        kind, val, pos = self.peek()
        if kind == "op" and val == "-":
            self.next()
            return ("neg", self.parse_unary())
        if kind == "op" and val == "+":
            self.next()
            return self.parse_unary()
        return self.parse_postfix()

    def parse_postfix(self):
        node = self.parse_atom()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val == "!":
                self.next()
                node = ("fact", node)
            elif kind == "op" and val == "^":
                self.next()
                expo = self.parse_unary_exponent()
                node = ("pow", node, expo)
            else:
                return node

    def parse_unary_exponent(self):
        kind, val, pos = self.peek()
        if kind == "op" and val == "-":
            self.next()
            return ("neg", self.parse_unary_exponent())
        return self.parse_postfix()

    def parse_atom(self):
        kind, val, pos = self.next()
        if kind == "num":
            return ("num", Fraction(val))
        if kind == "name":
            k2, v2, _ = self.peek()
            if k2 == "op" and v2 == "(":
                self.next()
                if val not in ("binomial", "rf"):
                    raise ParseError(f"unknown function {val!r}", pos)
                a = self.parse_expr()
                self.expect_op(",")
                b = self.parse_expr()
                self.expect_op(")")
                return ("call", val, a, b)
            return ("sym", val)
        if kind == "op" and val == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        raise ParseError(f"unexpected token {val!r}", pos)

    def parse_full(self):
        node = self.parse_expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"trailing input {val!r}", pos)
        return node


def _collect_symbols(node, acc):
    tag = node[0]
    if tag == "sym":
        acc.append(node[1])
    elif tag in ("+", "-", "*", "/", "pow"):
        _collect_symbols(node[1], acc)
        _collect_symbols(node[2], acc)
    elif tag in ("neg", "fact"):
        _collect_symbols(node[1], acc)
    elif tag == "call":
        _collect_symbols(node[2], acc)
        _collect_symbols(node[3], acc)


def _ast_to_rational(node, symbols) -> RationalFunction:
    tag = node[0]
    if tag == "num":
        return RationalFunction.constant(symbols, node[1])
    if tag == "sym":
        return RationalFunction.variable(symbols, node[1])
    if tag == "+":
        return _ast_to_rational(node[1], symbols) + _ast_to_rational(node[2], symbols)
    if tag == "-":
        return _ast_to_rational(node[1], symbols) - _ast_to_rational(node[2], symbols)
    if tag == "neg":
        return -_ast_to_rational(node[1], symbols)
    if tag == "*":
        return _ast_to_rational(node[1], symbols) * _ast_to_rational(node[2], symbols)
    if tag == "/":
        d = _ast_to_rational(node[2], symbols)
        if d.is_zero():
            raise ParseError("division by zero")
        return _ast_to_rational(node[1], symbols) / d
    if tag == "pow":
        e = _ast_to_rational(node[2], symbols)
        if not e.is_constant():
            raise ParseError("non-constant exponent in polynomial context")
        ev = _as_fraction(e.as_constant())
        if ev.denominator != 1:
            raise ParseError("fractional exponent in polynomial context")
        base = _ast_to_rational(node[1], symbols)
        n = ev.numerator
        if n >= 0:
            return RationalFunction(base.num ** n, base.den ** n)
        return RationalFunction(base.den ** (-n), base.num ** (-n))
    raise ParseError(f"factorial/binomial/rf not allowed inside a rational factor")


def _ast_to_linear(node, symbols) -> LinearForm:
    r = _ast_to_rational(node, symbols)
    if not r.den.is_constant():
        raise ParseError(f"argument is not affine: {r}")
    p = r.num.scale(Fraction(1, 1) / _as_fraction(r.den.as_constant()))
    if p.total_degree() > 1:
        raise ParseError(f"argument is not affine: {p}")
    coeffs = {}
    const = 0
    for exp, c in p.terms.items():
        if sum(exp) == 0:
            const = c
        else:
            s = symbols[exp.index(1)]
            coeffs[s] = c
    return LinearForm(coeffs, const)


def _is_pure_rational(node):
    tag = node[0]
    if tag in ("num", "sym"):
        return True
    if tag in ("+", "-", "*", "/"):
        return _is_pure_rational(node[1]) and _is_pure_rational(node[2])
    if tag == "neg":
        return _is_pure_rational(node[1])
    if tag == "pow":
        # integer constant exponent over rational base
        return (_is_pure_rational(node[1]) and node[2][0] in ("num", "neg")
                and _const_value(node[2]) is not None
                and _const_value(node[2]).denominator == 1)
    return False


def _const_value(node):
    if node[0] == "num":
        return node[1]
    if node[0] == "neg":
        v = _const_value(node[1])
        return None if v is None else -v
    return None


def _compile_product(node, symbols) -> TermExpression:
    """Flatten a product AST into a TermExpression."""
    factors = []  # (node, exponent sign)

    def walk(nd, sgn):
        tag = nd[0]
        if tag == "*":
            walk(nd[1], sgn)
            walk(nd[2], sgn)
        elif tag == "/":
            walk(nd[1], sgn)
            walk(nd[2], -sgn)
        else:
            factors.append((nd, sgn))

    walk(node, 1)
    term = TermExpression.one(symbols)
    facts, binos, riss, pows = [], [], [], []
    rat = RationalFunction.constant(symbols, 1)

    def add_rational(nd, sgn):
        nonlocal rat
        r = _ast_to_rational(nd, symbols)
        if r.is_zero() and sgn < 0:
            raise ParseError("division by zero factor")
        rat = rat * (r if sgn > 0 else r.inverse())

    for nd, sgn in factors:
        tag = nd[0]
        while tag == "neg":
            rat = rat * RationalFunction.constant(symbols, -1)
            nd = nd[1]
            tag = nd[0]
        if tag == "fact":
            facts.append((_ast_to_linear(nd[1], symbols), sgn))
        elif tag == "call":
            a = _ast_to_linear(nd[2], symbols)
            b = _ast_to_linear(nd[3], symbols)
            if nd[1] == "binomial":
                binos.append((a, b, sgn))
            else:
                riss.append((a, b, sgn))
        elif tag == "pow":
            base, expo = nd[1], nd[2]
            cv = _const_value(expo) if expo[0] in ("num", "neg") else None
            if cv is not None and cv.denominator == 1:
                # integer power: replicate the base factor
                n = cv.numerator * sgn
                sub = _compile_product(base, symbols)
                rep = sub if n >= 0 else sub.inverted()
                for _ in range(abs(n)):
                    facts.extend(rep.factorials)
                    binos.extend(rep.binomials)
                    riss.extend(rep.risings)
                    pows.extend(rep.powers)
                    rat = rat * rep.rational
            else:
                # constant base, affine exponent
                bv = _ast_to_rational(base, symbols)
                if not bv.is_constant():
                    raise ParseError(
                        "power base must be a rational constant (or -1)")
                bc = _as_fraction(bv.as_constant())
                if bc == 0:
                    raise ParseError("power base must be nonzero")
                expo_l = _ast_to_linear(expo, symbols)
                pows.append((bc, expo_l if sgn > 0 else expo_l.scale(-1)))
        elif _is_pure_rational(nd):
            add_rational(nd, sgn)
        else:
            raise ParseError(f"cannot interpret factor {nd!r}")
    return TermExpression(symbols, tuple(facts), tuple(binos), tuple(riss),
                          tuple(pows), rat)


def _normalize_powers(term: TermExpression) -> TermExpression:
    """Fold constant powers into the rational factor; drop base-1 powers."""
    extra = Fraction(1)
    pows = []
    for b, e in term.powers:
        if b == 1:
            continue
        if e.is_constant():
            extra *= _as_fraction(b) ** _int_value(e.const, "constant power exponent")
        else:
            pows.append((b, e))
    rational = term.rational
    if extra != 1:
        rational = rational * RationalFunction.constant(term.symbols, extra)
    return TermExpression(term.symbols, term.factorials, term.binomials,
                          term.risings, tuple(pows), rational)


def parse_sum(text, symbols=None) -> list:
    """Parse text into a list of TermExpressions (top-level sum of products)."""
    ast = _Parser(text).parse_full()
    if symbols is None:
        acc = []
        _collect_symbols(ast, acc)
        seen = []
        for s in acc:
            if s not in seen:
                seen.append(s)
        symbols = tuple(seen)
    else:
        symbols = tuple(symbols)

    if _is_pure_rational(ast):
        # a polynomial/rational expression is one factor, not a sum of terms
        return [_normalize_powers(_compile_product(ast, symbols))]

    addends = []

    def split(nd, sgn):
        if nd[0] == "+":
            split(nd[1], sgn)
            split(nd[2], sgn)
        elif nd[0] == "-":
            split(nd[1], sgn)
            split(nd[2], -sgn)
        elif nd[0] == "neg":
            split(nd[1], -sgn)
        else:
            addends.append((nd, sgn))

    split(ast, 1)
    out = []
    for nd, sgn in addends:
        t = _compile_product(nd, symbols)
        if sgn < 0:
            t = t.with_rational(RationalFunction.constant(symbols, -1))
        out.append(_normalize_powers(t))
    return out


def parse_term(text, symbols=None) -> TermExpression:
    """Parse a single product into a TermExpression."""
    terms = parse_sum(text, symbols)
    if len(terms) != 1:
        raise ParseError("expected a single product, found a sum")
    return terms[0]


# ---------------------------------------------------------------------------
# rendering


def _render_linear(L: LinearForm) -> str:
    return str(L)


def render(f: TermExpression) -> str:
    """Canonical text form; parse_term(render(f)) == f structurally."""
    num_parts = []
    den_parts = []

    def emit(s, e):
        (num_parts if e > 0 else den_parts).append(s)

    for u, l, e in f.binomials:
        emit(f"binomial({_render_linear(u)},{_render_linear(l)})", e)
    for a, e in f.factorials:
        emit(f"({_render_linear(a)})!", e)
    for b, c, e in f.risings:
        emit(f"rf({_render_linear(b)},{_render_linear(c)})", e)
    for b, e in f.powers:
        base = str(b) if (isinstance(b, int) or b.denominator == 1) and b > 0 \
            else f"({b})"
        num_parts.append(f"{base}^({_render_linear(e)})")
    if not (f.rational.is_constant() and f.rational.as_constant() == 1) or not num_parts:
        num_parts.append(f"(({f.rational.num}))" if f.rational.den.is_constant()
                         and f.rational.den.as_constant() == 1
                         else f"(({f.rational.num})/({f.rational.den}))")
    s = "*".join(num_parts) if num_parts else "1"
    for d in den_parts:
        s += f"/{d}"
    return s
