"""Products of affine and opaque polynomial factors, kept unexpanded.

Shift quotients of hypergeometric terms are products of affine forms (plus
numerators/denominators of rational factors).  Keeping the factorization
makes shift-gcd structure (dispersions) cheap to read off, which is what the
Gosper normal form needs; expansion happens only at the end.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _igcd, isqrt

from .polys import MultiPoly, _as_fraction, _norm_coef
from .terms import LinearForm, TermError


def _normalize_affine(L: LinearForm, order):
    """Scale an affine form to coprime integer coefficients, sign-canonical
    w.r.t. the given symbol order.  Returns (scale, normal form) with
    L = scale * normal."""
    entries = [(s, _as_fraction(c)) for s, c in L.coeffs.items()]
    entries.append((None, _as_fraction(L.const)))
    num = 0
    den = 1
    for _, c in entries:
        num = _igcd(num, abs(c.numerator))
        den = den * c.denominator // _igcd(den, c.denominator)
    if num == 0:
        raise ValueError("zero affine form")
    scale = Fraction(num, den)
    lead = None
    for s in order:
        if s in L.coeffs:
            lead = L.coeffs[s]
            break
    if lead is None:
        lead = L.const
    if lead < 0:
        scale = -scale
    return scale, L.scale(1 / scale)


class Factored:
    """const * prod(affine_i ^ e_i) * prod(opaque_j ^ e_j)."""

    __slots__ = ("vars", "const", "aff", "opq")

    def __init__(self, vars, const=1, aff=None, opq=None):
        self.vars = tuple(vars)
        self.const = const
        self.aff = aff or {}   # key -> [LinearForm, exp]
        self.opq = opq or {}   # key -> [MultiPoly, exp]

    @classmethod
    def one(cls, vars):
        return cls(vars)

    def copy(self):
        return Factored(self.vars, self.const,
                        {k: [f, e] for k, (f, e) in self.aff.items()},
                        {k: [p, e] for k, (p, e) in self.opq.items()})

    def is_one(self):
        return self.const == 1 and not self.aff and not self.opq

    def is_zero(self):
        return self.const == 0

    # -- building ----------------------------------------------------------

    def mul_const(self, c):
        self.const = _norm_coef(_as_fraction(self.const) * _as_fraction(c))
        return self

    def mul_affine(self, L: LinearForm, e: int):
        if e == 0:
            return self
        if L.is_constant():
            if L.const == 0:
                if e > 0:
                    self.const = 0
                    return self
                raise ZeroDivisionError("division by zero factor")
            return self.mul_const(_as_fraction(L.const) ** e)
        scale, normal = _normalize_affine(L, self.vars)
        self.mul_const(_as_fraction(scale) ** e)
        key = normal.sort_key()
        if key in self.aff:
            self.aff[key][1] += e
            if self.aff[key][1] == 0:
                del self.aff[key]
        else:
            self.aff[key] = [normal, e]
        return self

    def mul_poly(self, p: MultiPoly, e: int):
        if e == 0:
            return self
        if p.is_zero():
            if e > 0:
                self.const = 0
                return self
            raise ZeroDivisionError("division by zero factor")
        if p.is_constant():
            return self.mul_const(_as_fraction(p.as_constant()) ** e)
        if p.total_degree() == 1:
            coeffs = {}
            const = 0
            for exp, c in p.terms.items():
                if sum(exp) == 0:
                    const = c
                else:
                    coeffs[self.vars[exp.index(1)]] = c
            return self.mul_affine(LinearForm(coeffs, const), e)
        scale, prim = p.primitive()
        self.mul_const(_as_fraction(scale) ** e)
        key = prim.key()
        if key in self.opq:
            self.opq[key][1] += e
            if self.opq[key][1] == 0:
                del self.opq[key]
        else:
            self.opq[key] = [prim, e]
        return self

    def mul(self, other: "Factored"):
        self.mul_const(other.const)
        for f, e in other.aff.values():
            self.mul_affine(f, e)
        for p, e in other.opq.values():
            self.mul_poly(p, e)
        return self

    def inverse(self):
        out = Factored(self.vars, Fraction(1, 1) / _as_fraction(self.const))
        for f, e in self.aff.values():
            out.mul_affine(f, -e)
        for p, e in self.opq.values():
            out.mul_poly(p, -e)
        return out

    def pow(self, n: int):
        out = Factored(self.vars, _as_fraction(self.const) ** n)
        for f, e in self.aff.values():
            out.mul_affine(f, e * n)
        for p, e in self.opq.values():
            out.mul_poly(p, e * n)
        return out

    def shift(self, var, delta) -> "Factored":
        out = Factored(self.vars, self.const)
        for f, e in self.aff.values():
            out.mul_affine(f.shift(var, delta), e)
        for p, e in self.opq.values():
            out.mul_poly(p.shift(var, delta), e)
        return out

    def split(self):
        """Separate into (numerator, denominator), both with positive exponents."""
        num = Factored(self.vars, self.const)
        den = Factored.one(self.vars)
        for f, e in self.aff.values():
            (num if e > 0 else den).mul_affine(f, abs(e))
        for p, e in self.opq.values():
            (num if e > 0 else den).mul_poly(p, abs(e))
        return num, den

    # -- inspection -----------------------------------------------------------

    def factors(self):
        """All factors as (poly, exponent, is_affine, form-or-None)."""
        out = []
        for f, e in self.aff.values():
            out.append((f.to_poly(self.vars), e, True, f))
        for p, e in self.opq.values():
            out.append((p, e, False, None))
        return out

    def degree(self, var) -> int:
        d = 0
        for f, e in self.aff.values():
            if f.var_coeff(var) != 0:
                d += e
        for p, e in self.opq.values():
            d += p.degree(var) * e
        return d

    def expand(self) -> MultiPoly:
        out = MultiPoly.constant(self.vars, self.const)
        for f, e in self.aff.values():
            if e < 0:
                raise ValueError("cannot expand negative exponents")
            out = out * (f.to_poly(self.vars) ** e)
        for p, e in self.opq.values():
            if e < 0:
                raise ValueError("cannot expand negative exponents")
            out = out * (p ** e)
        return out

    def divide_factor(self, kind, key, d_poly: MultiPoly):
        """Divide one copy of the stored factor (kind, key) by d_poly, which
        is known to divide it; the cofactor stays in the product."""
        if kind == "aff":
            form, e = self.aff[key]
            quo = form.to_poly(self.vars).divexact(d_poly)  # a constant
            self.aff[key][1] -= 1
            if self.aff[key][1] == 0:
                del self.aff[key]
            self.mul_const(quo.as_constant())
        else:
            p, e = self.opq[key]
            quo = p.divexact(d_poly)
            self.opq[key][1] -= 1
            if self.opq[key][1] == 0:
                del self.opq[key]
            self.mul_poly(quo, 1)

    def __str__(self):
        parts = [str(self.const)]
        for f, e in self.aff.values():
            parts.append(f"({f})^{e}")
        for p, e in self.opq.values():
            parts.append(f"({p})^{e}")
        return " * ".join(parts)


def from_ratio_parts(vars, const, affine, opaque) -> Factored:
    out = Factored(vars, const)
    for L, e in affine:
        out.mul_affine(L, e)
    for p, e in opaque:
        out.mul_poly(p.embed(vars) if p.vars != tuple(vars) else p, e)
    return out


def factored_lcm(items) -> Factored:
    """lcm of factored products with positive exponents (constants dropped)."""
    items = list(items)
    out = Factored.one(items[0].vars)
    for it in items:
        for key, (f, e) in it.aff.items():
            if key not in out.aff:
                out.aff[key] = [f, e]
            else:
                out.aff[key][1] = max(out.aff[key][1], e)
        for key, (p, e) in it.opq.items():
            if key not in out.opq:
                out.opq[key] = [p, e]
            else:
                out.opq[key][1] = max(out.opq[key][1], e)
    return out


def factored_quotient(a: Factored, b: Factored) -> Factored:
    """a / b where every factor of b occurs in a with at least its exponent."""
    out = a.copy()
    out.mul_const(Fraction(1, 1) / _as_fraction(b.const))
    for key, (f, e) in b.aff.items():
        cur = out.aff.get(key)
        if cur is None or cur[1] < e:
            raise ValueError("inexact factored quotient")
        cur[1] -= e
        if cur[1] == 0:
            del out.aff[key]
    for key, (p, e) in b.opq.items():
        cur = out.opq.get(key)
        if cur is None or cur[1] < e:
            raise ValueError("inexact factored quotient")
        cur[1] -= e
        if cur[1] == 0:
            del out.opq[key]
    return out


# ---------------------------------------------------------------------------
# integer roots


def _divisors(n: int):
    n = abs(n)
    if n == 0:
        raise ValueError("divisors of zero")
    if n > 10 ** 12:
        raise ArithmeticError("constant term too large for divisor enumeration")
    small = []
    big = []
    d = 1
    while d <= isqrt(n):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                big.append(n // d)
        d += 1
    return small + big[::-1]


def _primes_from(start, count):
    out = []
    cand = start | 1
    while len(out) < count:
        p = cand
        is_p = p > 1
        d = 3
        if p % 2 == 0:
            is_p = p == 2
        while is_p and d * d <= p:
            if p % d == 0:
                is_p = False
            d += 2
        if is_p:
            out.append(p)
        cand += 2
    return out


def _roots_mod_p(ints, p):
    cs = [c % p for c in ints]
    if not any(cs):
        return None  # polynomial vanishes mod p; prime gives no information
    roots = []
    for t in range(p):
        total = 0
        for c in reversed(cs):
            total = (total * t + c) % p
        if total == 0:
            roots.append(t)
    return roots


def _integer_roots_modular(ints, val):
    """Complete integer root search via roots modulo enough primes.

    Every integer root is bounded by the Lagrange bound B and determined by
    its residues modulo primes with product > 2B; candidate residues are
    CRT-combined and verified exactly."""
    lead = abs(ints[-1])
    B = 1 + max(abs(c) for c in ints) // lead
    need = 2 * B + 1
    primes = []
    residues = []  # list of root lists per prime
    modulus = 1
    start = 10007
    while modulus <= need:
        p = _primes_from(start, 1)[0]
        start = p + 2
        rs = _roots_mod_p(ints, p)
        if rs is None:
            continue  # cannot happen for content-free input, kept for safety
        if not rs:
            return []  # no roots mod p: no integer roots at all
        primes.append(p)
        residues.append(rs)
        modulus *= p
        combos = 1
        for r_ in residues:
            combos *= len(r_)
        if combos > 200000:
            raise ArithmeticError("too many modular root candidates")
    # CRT combine
    cands = [0]
    m = 1
    for p, rs in zip(primes, residues):
        new = []
        inv = pow(m % p, -1, p)
        for c in cands:
            for r in rs:
                t = ((r - c) * inv) % p
                new.append(c + m * t)
        cands = new
        m *= p
    roots = []
    for c in cands:
        r = c if c <= m // 2 else c - m
        if abs(r) <= B and val(r) == 0:
            roots.append(r)
    return roots


def integer_roots_univar(coeffs) -> list:
    """Integer roots of a univariate polynomial given by Fraction/int coeffs
    (ascending).  Divisor enumeration of the trailing coefficient when it is
    small; a modular CRT search under the Lagrange root bound otherwise."""
    while coeffs and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    if not coeffs:
        raise ValueError("zero polynomial has every integer as a root")
    den = 1
    for c in coeffs:
        f = _as_fraction(c)
        den = den * f.denominator // _igcd(den, f.denominator)
    ints = [int(_as_fraction(c) * den) for c in coeffs]
    roots = []
    shift = 0
    while ints and ints[0] == 0:
        ints = ints[1:]
        if shift == 0:
            roots.append(0)
        shift += 1
    if len(ints) <= 1:
        return sorted(set(roots))
    content = 0
    for c in ints:
        content = _igcd(content, abs(c))
    ints = [c // content for c in ints]
    c0 = ints[0]

    def val(x):
        total = 0
        for c in reversed(ints):
            total = total * x + c
        return total

    if abs(c0) <= 10 ** 12:
        for d in _divisors(c0):
            for cand in (d, -d):
                if val(cand) == 0:
                    roots.append(cand)
    else:
        roots.extend(_integer_roots_modular(ints, val))
    return sorted(set(roots))


def integer_roots_in_var(p: MultiPoly, var) -> list:
    """Integers v0 with p(var=v0) identically zero in the other variables."""
    if p.is_zero():
        raise ValueError("zero polynomial")
    coeffs = p.to_univar(var)
    if len(coeffs) == 1:
        return []
    # candidate roots come from one monomial slice (any root of p is a root of
    # every slice); prefer the slice with the smallest trailing coefficient
    monos = set()
    for c in coeffs:
        monos.update(c.terms.keys())
    slices = []
    for mono in monos:
        s = [c.terms.get(mono, 0) for c in coeffs]
        if any(s):
            trailing = next(abs(_as_fraction(x).numerator) for x in s if x)
            slices.append((trailing, s))
    slices.sort(key=lambda t: t[0])
    candidates = None
    for _, s in slices:
        try:
            candidates = integer_roots_univar(s)
            break
        except ArithmeticError:
            continue
    if candidates is None:
        raise ArithmeticError("no tractable coefficient slice for root search")
    return sorted(v for v in candidates
                  if p.eval_partial({var: v}).is_zero())


# ---------------------------------------------------------------------------
# dispersion and the Gosper normal form


def _sylvester_resultant(f_coeffs, g_coeffs, vars):
    """Resultant of two univariate polynomials with MultiPoly coefficients
    (ascending lists), via fraction-free elimination of the Sylvester matrix."""
    m = len(f_coeffs) - 1
    n = len(g_coeffs) - 1
    if m < 0 or n < 0:
        return MultiPoly.zero(vars)
    size = m + n
    zero = MultiPoly.zero(vars)
    rows = []
    frow = list(reversed(f_coeffs))
    grow = list(reversed(g_coeffs))
    for i in range(n):
        rows.append([zero] * i + frow + [zero] * (size - i - m - 1))
    for i in range(m):
        rows.append([zero] * i + grow + [zero] * (size - i - n - 1))
    return _det_bareiss(rows, vars)


def _det_bareiss(rows, vars) -> MultiPoly:
    n = len(rows)
    if n == 0:
        return MultiPoly.constant(vars, 1)
    a = [list(r) for r in rows]
    sign = 1
    prev = MultiPoly.constant(vars, 1)
    for k in range(n - 1):
        if a[k][k].is_zero():
            for i in range(k + 1, n):
                if not a[i][k].is_zero():
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return MultiPoly.zero(vars)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]).divexact(prev)
            a[i][k] = MultiPoly.zero(vars)
        prev = a[k][k]
    d = a[n - 1][n - 1]
    return d if sign > 0 else -d


_JVAR = "_j"


def _shift_candidates(fq, fr, k, vars):
    """Nonnegative integers j with gcd(fq(k), fr(k+j)) nontrivial, for one
    factor from each side.  fq, fr are (poly, is_affine, form)."""
    pq, aq, Lq = fq
    pr, ar, Lr = fr
    if aq and Lq.var_coeff(k) == 0:
        return []
    if ar and Lr.var_coeff(k) == 0:
        return []
    if not aq and pq.degree(k) == 0:
        return []
    if not ar and pr.degree(k) == 0:
        return []
    if aq and ar:
        alpha1 = _as_fraction(Lq.var_coeff(k))
        alpha2 = _as_fraction(Lr.var_coeff(k))
        lam = alpha2 / alpha1
        c1 = {s: c for s, c in Lq.coeffs.items() if s != k}
        c2 = {s: c for s, c in Lr.coeffs.items() if s != k}
        if {s: _as_fraction(c) * lam for s, c in c1.items()} != \
                {s: _as_fraction(c) for s, c in c2.items()}:
            return []
        j = _as_fraction(Lq.const) / alpha1 - _as_fraction(Lr.const) / alpha2
        if j.denominator == 1 and j >= 0:
            return [int(j)]
        return []
    jvars = vars + (_JVAR,)
    jpoly = MultiPoly.variable(jvars, _JVAR)
    kpoly = MultiPoly.variable(jvars, k)
    if aq != ar:
        # one affine, one opaque: substitute the affine root into the other
        if aq:
            alpha = _as_fraction(Lq.var_coeff(k))
            beta = LinearForm({s: c for s, c in Lq.coeffs.items() if s != k},
                              Lq.const).to_poly(jvars)
            g = pr.embed(jvars)
            # root of fq: k* = -beta/alpha; need g(k* + j) == 0
            arg = jpoly.scale(alpha) - beta
        else:
            alpha = _as_fraction(Lr.var_coeff(k))
            beta = LinearForm({s: c for s, c in Lr.coeffs.items() if s != k},
                              Lr.const).to_poly(jvars)
            g = pq.embed(jvars)
            # root of fr(k+j): k* = -(beta + alpha*j)/alpha; need g(k*) == 0
            arg = -(beta + jpoly.scale(alpha))
        coeffs = g.to_univar(k)
        d = len(coeffs) - 1
        # h = alpha^d * g(arg/alpha) = sum_i g_i * arg^i * alpha^(d-i)
        h = MultiPoly.zero(jvars)
        argpow = MultiPoly.constant(jvars, 1)
        for i, c in enumerate(coeffs):
            h = h + c * argpow * MultiPoly.constant(jvars, alpha ** (d - i))
            if i < d:
                argpow = argpow * arg
    else:
        gq = pq.embed(jvars)
        gr = pr.embed(jvars).subst_linear(k, kpoly + jpoly)
        h = _sylvester_resultant(gq.to_univar(k), gr.to_univar(k), jvars)
    if h.is_zero():
        raise TermError("degenerate shift structure (identically zero resultant)")
    if h.is_constant():
        return []
    if h.degree(_JVAR) <= 0:
        return []
    return [j for j in integer_roots_in_var(h, _JVAR) if j >= 0]


def dispersion_set(num: Factored, den: Factored, k) -> list:
    js = set()
    nf = [(p, a, L) for p, e, a, L in num.factors() if e > 0]
    df = [(p, a, L) for p, e, a, L in den.factors() if e > 0]
    for fq in nf:
        for fr in df:
            js.update(_shift_candidates(fq, fr, k, num.vars))
    return sorted(js)


def _pairwise_gcd_at(num: Factored, den: Factored, j: int, k):
    """One nontrivial common factor of num(k) and den(k+j).

    Returns (g_poly, (kind_q, key_q), (kind_r, key_r)) or None; g_poly is a
    divisor of the q-side factor, and g_poly(k-j) divides the r-side factor.
    """
    from .polys import poly_gcd
    qfacts = [("aff", key, f.to_poly(num.vars), f) for key, (f, e) in num.aff.items()
              if e > 0 and f.var_coeff(k) != 0]
    qfacts += [("opq", key, p, None) for key, (p, e) in num.opq.items()
               if e > 0 and p.degree(k) > 0]
    rfacts = [("aff", key, f.to_poly(den.vars), f) for key, (f, e) in den.aff.items()
              if e > 0 and f.var_coeff(k) != 0]
    rfacts += [("opq", key, p, None) for key, (p, e) in den.opq.items()
               if e > 0 and p.degree(k) > 0]
    for kq, keyq, pq, Lq in qfacts:
        for kr, keyr, pr, Lr in rfacts:
            if kq == "aff" and kr == "aff":
                if _normalize_affine(Lr.shift(k, j), num.vars)[1] == Lq:
                    return pq, ("aff", keyq), ("aff", keyr)
            else:
                g = poly_gcd(pq, pr.shift(k, j))
                if not g.is_constant():
                    return g, (kq, keyq), (kr, keyr)
    return None


def gosper_normal(ratio_num: Factored, ratio_den: Factored, k):
    """Decompose num/den = pbar(k+1)/pbar(k) * q(k)/r(k) with
    gcd(q(k), r(k+j)) = 1 for every integer j >= 0.

    The peeled factors accumulate in pbar; q keeps the constant.  Dispersion
    j = 0 doubles as plain cancellation of common factors.
    """
    q = ratio_num.copy()
    r = ratio_den.copy()
    pbar = Factored.one(q.vars)
    for j in dispersion_set(ratio_num, ratio_den, k):
        while True:
            hit = _pairwise_gcd_at(q, r, j, k)
            if hit is None:
                break
            g_poly, (kq, keyq), (kr, keyr) = hit
            q.divide_factor(kq, keyq, g_poly)
            r.divide_factor(kr, keyr, g_poly.shift(k, -j))
            for t in range(1, j + 1):
                pbar.mul_poly(g_poly.shift(k, -t), 1)
    return pbar, q, r
