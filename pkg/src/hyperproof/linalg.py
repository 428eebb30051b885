"""Exact linear algebra over polynomials: fraction-free elimination,
nullspaces over the rational-function field, numeric determinants, and
permanent-based determinant degree bounds.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

from .polys import MultiPoly, RationalFunction, poly_gcd, _as_fraction


class PolyMatrix:
    """Rectangular matrix of polynomials over one shared variable list."""

    __slots__ = ("vars", "rows", "cols", "entries", "avoid")

    def __init__(self, entries, avoid=None):
        if not entries or not entries[0]:
            raise ValueError("matrix must be nonempty")
        self.rows = len(entries)
        self.cols = len(entries[0])
        self.vars = entries[0][0].vars
        for row in entries:
            if len(row) != self.cols:
                raise ValueError("ragged matrix")
            for e in row:
                if e.vars != self.vars:
                    raise ValueError("entries must share one variable list")
        self.entries = entries
        # integer values per variable that grid construction should step over
        self.avoid = avoid or {}

    def is_square(self):
        return self.rows == self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @classmethod
    def from_rows(cls, vars, rows, avoid=None):
        """Build from nested lists of polynomials/ints/Fractions."""
        vars = tuple(vars)
        out = []
        for row in rows:
            out.append([
                e if isinstance(e, MultiPoly) else MultiPoly.constant(vars, e)
                for e in row
            ])
        return cls(out, avoid=avoid)


def det_at_point(m: PolyMatrix, point: dict) -> Fraction:
    """Exact determinant of m evaluated at an integer/rational point.

    Bareiss fraction-free elimination over exact rationals; no rounding.
    """
    if not m.is_square():
        raise ValueError("determinant of a non-square matrix")
    n = m.rows
    a = [[_as_fraction(m.entries[i][j].eval(point)) for j in range(n)] for i in range(n)]
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
            a[i][k] = Fraction(0)
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def det_symbolic(m: PolyMatrix) -> MultiPoly:
    """Symbolic determinant by cofactor expansion (oracle; small matrices only)."""
    if not m.is_square():
        raise ValueError("determinant of a non-square matrix")
    n = m.rows

    def rec(rows, cols):
        if len(cols) == 1:
            return m.entries[rows[0]][cols[0]]
        total = MultiPoly.zero(m.vars)
        r = rows[0]
        for idx, c in enumerate(cols):
            sub = rec(rows[1:], cols[:idx] + cols[idx + 1:])
            term = m.entries[r][c] * sub
            total = total + term if idx % 2 == 0 else total - term
        return total

    return rec(tuple(range(n)), tuple(range(n)))


def solve_nullspace(m: PolyMatrix) -> list:
    """Basis of the right nullspace over the rational-function field.

    Fraction-free forward elimination, then back-substitution.  Basis vectors
    are normalized: denominators cleared, content removed, first nonzero
    coordinate made positive.  Empty list iff m has full column rank.

    Univariate matrices of corank <= 1 take an evaluation/interpolation
    shortcut (numeric cofactor minors at enough integer points, then exact
    interpolation), which avoids the coefficient blowup of the symbolic
    elimination; the interpolated vector is re-verified symbolically.
    """
    if len(m.vars) == 1 and m.cols >= 4:
        fast = _nullspace_univar(m)
        if fast is not None:
            return fast
    rows = [list(r) for r in m.entries]
    nrows, ncols = m.rows, m.cols
    pivots = []  # (row, col)
    prev = MultiPoly.constant(m.vars, 1)
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if not rows[i][c].is_zero():
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        piv = rows[r][c]
        for i in range(r + 1, nrows):
            fi = rows[i][c]
            # transform every row below, even with fi = 0, so that entries stay
            # minors of the input and the Bareiss division remains exact
            for j in range(c + 1, ncols):
                rows[i][j] = (rows[i][j] * piv - fi * rows[r][j]).divexact(prev)
            rows[i][c] = MultiPoly.zero(m.vars)
        pivots.append((r, c))
        prev = piv
        r += 1
        if r == nrows:
            break
    pivot_cols = [c for _, c in pivots]
    free_cols = [c for c in range(ncols) if c not in pivot_cols]
    basis = []
    one = RationalFunction.constant(m.vars, 1)
    zero = RationalFunction.constant(m.vars, 0)
    for fc in free_cols:
        vec = [zero] * ncols
        vec[fc] = one
        for pr, pc in reversed(pivots):
            s = zero
            for j in range(pc + 1, ncols):
                if not vec[j].is_zero() and not rows[pr][j].is_zero():
                    s = s + RationalFunction.from_poly(rows[pr][j]) * vec[j]
            vec[pc] = -(s / RationalFunction.from_poly(rows[pr][pc]))
        basis.append(_normalize_vector(vec))
    return basis


def clear_and_primitive(polys):
    """Strip the common polynomial factor and rational content from a list of
    polynomials; make the first nonzero one positively led.  Returns new list."""
    from math import gcd, lcm
    content = None
    for p in polys:
        if not p.is_zero():
            content = p if content is None else poly_gcd(content, p)
            if content.is_constant():
                break
    if content is None:
        return list(polys)
    if not content.is_constant():
        polys = [p.divexact(content) if not p.is_zero() else p for p in polys]
    num = 0
    den = 1
    for p in polys:
        c = p.content()
        num = gcd(num, c.numerator)
        den = lcm(den, c.denominator)
    scale = Fraction(num, den)
    first = next(p for p in polys if not p.is_zero())
    if first.leading_coeff() < 0:
        scale = -scale
    return [p.scale(1 / scale) for p in polys]


def _normalize_vector(vec):
    """Clear denominators, strip content, make the first nonzero entry positive."""
    from .polys import poly_lcm
    vars = vec[0].vars
    den = MultiPoly.constant(vars, 1)
    for v in vec:
        if not v.is_zero():
            den = poly_lcm(den, v.den)
    polys = [v.num * den.divexact(v.den) if not v.is_zero() else MultiPoly.zero(vars)
             for v in vec]
    polys = clear_and_primitive(polys)
    return [RationalFunction.from_poly(p) for p in polys]


def _int_det(a) -> int:
    """Determinant of a small integer matrix, fraction-free (destructive)."""
    n = len(a)
    sign = 1
    prev = 1
    for c in range(n - 1):
        if a[c][c] == 0:
            for i in range(c + 1, n):
                if a[i][c]:
                    a[c], a[i] = a[i], a[c]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(c + 1, n):
            f = a[i][c]
            for j in range(c + 1, n):
                a[i][j] = (a[i][j] * a[c][c] - f * a[c][j]) // prev
            a[i][c] = 0
        prev = a[c][c]
    return sign * a[n - 1][n - 1]


def _interpolate_int(values) -> list:
    """Coefficients of the polynomial with given values at nodes 0..len-1."""
    n = len(values)
    dd = [Fraction(v) for v in values]  # divided differences, in place
    for level in range(1, n):
        for i in range(n - 1, level - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / level
    coeffs = [Fraction(0)] * n
    # Newton form: dd[m] * prod_{t<m} (x - t), accumulated backwards
    acc = [Fraction(0)] * n
    for mth in range(n - 1, -1, -1):
        # acc := acc * (x - m) + dd[m]
        shifted = [Fraction(0)] * n
        for i in range(n - 1):
            if acc[i]:
                shifted[i + 1] += acc[i]
                shifted[i] -= acc[i] * mth
        shifted[0] += dd[mth]
        acc = shifted
    return acc


def _nullspace_univar(m: PolyMatrix):
    """Evaluation/interpolation nullspace for univariate matrices.

    Handles corank 0 (full column rank at some probe point) and corank 1
    (one basis vector, recovered as the cofactor vector of a well-chosen
    row subset).  Returns None to fall back to symbolic elimination.
    """
    var = m.vars[0]
    dense = []
    for row in m.entries:
        den = 1
        for p in row:
            for c in p.terms.values():
                if isinstance(c, Fraction):
                    from math import lcm
                    den = lcm(den, c.denominator)
        drow = []
        for p in row:
            coeffs = [0] * (p.degree(var) + 1 if not p.is_zero() else 1)
            for exp, c in p.terms.items():
                coeffs[exp[0]] = int(c * den) if den != 1 else c
            drow.append(coeffs)
        dense.append(drow)

    def value_matrix(t, rows_idx=None, skip_col=None):
        rows_idx = range(m.rows) if rows_idx is None else rows_idx
        out = []
        for i in rows_idx:
            r = []
            for j in range(m.cols):
                if j == skip_col:
                    continue
                total = 0
                for c in reversed(dense[i][j]):
                    total = total * t + c
                r.append(total)
            out.append(r)
        return out

    # probe the rank at a few points clear of small-integer coincidences
    best_rank = -1
    best_pivots = None
    for t in (101, 137, 211):
        a = value_matrix(t)
        pivots = _int_row_pivots(a, m.cols)
        if len(pivots) > best_rank:
            best_rank = len(pivots)
            best_pivots = pivots
        if best_rank == m.cols:
            return []
    if best_rank < m.cols - 1:
        return None  # corank >= 2: fall back to the symbolic path
    rows_sub = best_pivots
    deg_rows = [[max((d for d, c in enumerate(dense[i][j]) if c), default=-1)
                 for j in range(m.cols)] for i in rows_sub]
    bound = 0
    for skip in range(m.cols):
        sub = [[r[j] for j in range(m.cols) if j != skip] for r in deg_rows]
        b = _max_assignment(sub)
        if b is not None:
            bound = max(bound, b)
    nodes = bound + 1
    comps = [[] for _ in range(m.cols)]
    for t in range(nodes):
        for j in range(m.cols):
            comps[j].append(_int_det(value_matrix(t, rows_sub, skip_col=j)))
    vec = []
    vars = m.vars
    for j in range(m.cols):
        coeffs = _interpolate_int(comps[j])
        sign = 1 if j % 2 == 0 else -1
        vec.append(MultiPoly.from_terms(
            vars, [((d,), sign * c) for d, c in enumerate(coeffs) if c]))
    if all(p.is_zero() for p in vec):
        return None
    # exact re-verification against every row of the full matrix
    for row in m.entries:
        s = MultiPoly.zero(vars)
        for e, p in zip(row, vec):
            s = s + e * p
        if not s.is_zero():
            return None
    vec = clear_and_primitive(vec)
    return [[RationalFunction.from_poly(p) for p in vec]]


def _int_row_pivots(a, cols):
    """Row indices used as pivots by fraction-free elimination on an integer
    matrix (destructive on a)."""
    rows = len(a)
    order = list(range(rows))
    pivots = []
    r = 0
    prev = 1
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if a[i][c]:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
            order[r], order[piv] = order[piv], order[r]
        for i in range(r + 1, rows):
            f = a[i][c]
            for j in range(c + 1, cols):
                a[i][j] = (a[i][j] * a[r][c] - f * a[r][j]) // prev
            a[i][c] = 0
        pivots.append(order[r])
        prev = a[r][c]
        r += 1
        if r == rows:
            break
    return sorted(pivots)


class DegreeBoundResult(NamedTuple):
    degree: int
    structurally_zero: bool


def permanent_degree_bound(m: PolyMatrix, var) -> DegreeBoundResult:
    """Upper bound for the determinant's degree in `var`.

    Replace every entry by its leading term w.r.t. var and take the permanent;
    a permanent of monomials has no cancellation, so its degree bounds the
    determinant's.  Equivalently: maximum over permutations of the summed
    per-entry degrees, a max-weight perfect assignment on the degree matrix.
    Zero entries admit no assignment; if no perfect assignment exists the
    determinant is structurally zero and the flag is set.
    """
    if not m.is_square():
        raise ValueError("degree bound of a non-square matrix")
    degs = [[e.degree(var) for e in row] for row in m.entries]  # -1 marks zero
    best = _max_assignment(degs)
    if best is None:
        return DegreeBoundResult(0, True)
    return DegreeBoundResult(best, False)


def _max_assignment(degs) -> int | None:
    """Max-weight assignment choosing one entry per row, all columns distinct.

    Rows may outnumber columns (any subset of rows of matching size is allowed);
    weights of -1 mark forbidden entries.  Bitmask DP over column subsets.
    """
    nrows = len(degs)
    ncols = len(degs[0])
    if nrows < ncols:
        raise ValueError("need at least as many rows as columns")
    NEG = None
    full = (1 << ncols) - 1
    # dp[mask] = best weight using some rows so far covering exactly `mask`
    dp = {0: 0}
    for i in range(nrows):
        ndp = dict(dp)  # skipping row i is allowed when rows > cols
        row = degs[i]
        for mask, w in dp.items():
            for j in range(ncols):
                if mask & (1 << j) or row[j] < 0:
                    continue
                nm = mask | (1 << j)
                nw = w + row[j]
                if ndp.get(nm, -1) < nw:
                    ndp[nm] = nw
        if nrows == ncols:
            # every row must be used: states must have popcount == i+1
            ndp = {mask: w for mask, w in ndp.items()
                   if bin(mask).count("1") == i + 1}
        dp = ndp
        if not dp:
            return NEG
    return dp.get(full, NEG)
