"""Exact rational scalars, vectors and matrices.

Everything here is pure and allocation-light: matrices are tuples of tuples
of ints or Fractions, vectors are tuples.  No floating point is used in any
decision path.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

Vec = tuple
Mat = tuple


def frac_str(x) -> str:
    """Serialize a rational as "p/q", or "p" when the denominator is 1."""
    f = Fraction(x)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def parse_frac(s) -> Fraction:
    """Parse the "p/q" convention; plain ints are accepted as well."""
    if isinstance(s, int):
        return Fraction(s)
    return Fraction(str(s))


def mat_from_rows(rows: Sequence[Sequence]) -> Mat:
    return tuple(tuple(row) for row in rows)


def identity(n: int) -> Mat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(m: Mat) -> Mat:
    return tuple(zip(*m))


def mat_mul(a: Mat, b: Mat) -> Mat:
    bt = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def mat_vec(m: Mat, v: Vec) -> Vec:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in m)


def vec_dot(u: Vec, v: Vec):
    return sum(x * y for x, y in zip(u, v))


def gram_product(gram: Mat, u: Vec, v: Vec):
    """Inner product u.v with respect to a symmetric Gram matrix."""
    return vec_dot(u, mat_vec(gram, v))


def is_symmetric(m: Mat) -> bool:
    n = len(m)
    return all(len(row) == n for row in m) and all(
        m[i][j] == m[j][i] for i in range(n) for j in range(i + 1, n)
    )


def mat_det(m: Mat) -> Fraction:
    """Determinant by fraction-free style elimination over Fraction."""
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            if a[r][col]:
                f = a[r][col] * inv
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    return det


def mat_inv(m: Mat) -> Mat:
    """Inverse of a square rational matrix (Gauss-Jordan)."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(i == j) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        d = a[col][col]
        a[col] = [x / d for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[n:]) for row in a)


def solve_linear(a: Mat, b: Vec) -> Vec | None:
    """Unique rational solution of a (possibly overdetermined) system.

    Returns None when the system is inconsistent; raises when the solution
    space has positive dimension (callers here always have full column rank).
    """
    rows = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(a, b)]
    nr, nc = len(rows), len(a[0])
    pivots = []
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        d = rows[r][c]
        rows[r] = [x / d for x in rows[r]]
        for i in range(nr):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    for i in range(r, nr):
        if rows[i][nc] != 0:
            return None
    if len(pivots) < nc:
        raise ValueError("solution space has positive dimension")
    sol = [Fraction(0)] * nc
    for i, c in enumerate(pivots):
        sol[c] = rows[i][nc]
    return tuple(sol)


def signature(m: Mat) -> tuple[int, int, int]:
    """Counts of positive/negative/zero eigenvalues of a symmetric matrix.

    Computed exactly by congruence (Schur complement) diagonalization over
    the rationals; never through floating point.
    """
    n = len(m)
    if not is_symmetric(m):
        raise ValueError("signature requires a symmetric matrix")
    a = [[Fraction(x) for x in row] for row in m]
    pos = neg = zero = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if a[i][i] != 0), None)
        if piv is None:
            off = next(((i, j) for i in active for j in active
                        if j > i and a[i][j] != 0), None)
            if off is None:
                zero += len(active)
                break
            i, j = off
            # a[i][i] and a[j][j] both vanish, so adding row+column j to i
            # puts 2*a[i][j] != 0 on the diagonal.
            for c in active:
                a[i][c] += a[j][c]
            for r in active:
                a[r][i] += a[r][j]
            piv = i
        d = a[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        active.remove(piv)
        col = [a[r][piv] for r in range(n)]
        for r in active:
            fr = col[r]
            if fr:
                f = fr / d
                arow = a[r]
                prow = a[piv]
                for c in active:
                    arow[c] -= f * prow[c]
    return pos, neg, zero


def smith_normal_form(m: Mat) -> tuple[list[int], Mat, Mat]:
    """Smith normal form of an integer matrix.

    Returns (diagonal, left, right) with left*m*right diagonal, the
    transforms unimodular, and d_1 | d_2 | ... | d_r followed by zeros.
    """
    nr = len(m)
    nc = len(m[0]) if nr else 0
    a = [[int(x) for x in row] for row in m]
    left = [[int(i == j) for j in range(nr)] for i in range(nr)]
    right = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def row_op(i, j, q):  # row_i -= q * row_j
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        left[i] = [x - q * y for x, y in zip(left[i], left[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for row in a:
            row[i] -= q * row[j]
        for row in right:
            row[i] -= q * row[j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        left[i], left[j] = left[j], left[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in right:
            row[i], row[j] = row[j], row[i]

    t = 0
    size = min(nr, nc)
    while t < size:
        piv = min(((abs(a[i][j]), i, j) for i in range(t, nr)
                   for j in range(t, nc) if a[i][j]), default=None)
        if piv is None:
            break
        _, pi, pj = piv
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    row_op(i, t, q)
                    if a[i][t]:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, nc):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    col_op(j, t, q)
                    if a[t][j]:
                        swap_cols(t, j)
                        dirty = True
            if not dirty:
                break
        # enforce divisibility of the remaining block by the pivot
        fixed = True
        for i in range(t + 1, nr):
            for j in range(t + 1, nc):
                if a[i][j] % a[t][t]:
                    row_op(t, i, -1)
                    fixed = False
                    break
            if not fixed:
                break
        if fixed:
            if a[t][t] < 0:
                a[t] = [-x for x in a[t]]
                left[t] = [-x for x in left[t]]
            t += 1
    diag = [a[i][i] for i in range(size)]
    return diag, mat_from_rows(left), mat_from_rows(right)


def rank_kernel(m: Mat) -> tuple[int, list[Vec]]:
    """Rank and a saturated basis of the integer null space of m."""
    nc = len(m[0]) if m else 0
    diag, _, right = smith_normal_form(m)
    rank = sum(1 for d in diag if d)
    kernel = [tuple(right[i][j] for i in range(nc))
              for j in range(len(diag)) if diag[j] == 0]
    kernel += [tuple(right[i][j] for i in range(nc))
               for j in range(len(diag), nc)]
    return rank, kernel


def hermite_normal_form(rows: Sequence[Vec]) -> list[list[int]]:
    """Row-style HNF basis (upper triangular, nonneg off-diagonal residues)
    of the lattice generated by the given integer row vectors."""
    work = [list(map(int, r)) for r in rows if any(r)]
    nc = len(rows[0])
    basis: list[list[int]] = []
    col = 0
    while col < nc and work:
        pivots = [r for r in work if r[col]]
        if not pivots:
            col += 1
            continue
        while len(pivots) > 1:
            pivots.sort(key=lambda r: abs(r[col]))
            p = pivots[0]
            for r in pivots[1:]:
                q = r[col] // p[col]
                for c in range(nc):
                    r[c] -= q * p[c]
            pivots = [r for r in pivots if r[col]]
        p = pivots[0]
        if p[col] < 0:
            for c in range(nc):
                p[c] = -p[c]
        basis.append(p)
        work = [r for r in work if r is not p and any(r)]
        for r in work:
            if r[col]:
                q = r[col] // p[col]
                for c in range(nc):
                    r[c] -= q * p[c]
        work = [r for r in work if any(r)]
        col += 1
    # reduce above the pivots
    for i in range(len(basis) - 1, -1, -1):
        lead = next(c for c in range(nc) if basis[i][c])
        for j in range(i):
            q = basis[j][lead] // basis[i][lead]
            if q:
                for c in range(nc):
                    basis[j][c] -= q * basis[i][c]
    return basis


def divisors(n: int) -> list[int]:
    """Sorted positive divisors of a positive integer."""
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (inputs here are small)."""
    n = abs(n)
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_perfect_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


# --- certified comparison CC' < 4K^2 ------------------------------------

def _sqrt_bounds(x: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Certified enclosure of sqrt(x) for x >= 0 with ~2^-bits width."""
    if x == 0:
        return Fraction(0), Fraction(0)
    num, den = x.numerator, x.denominator
    n = num * den
    scale = 1 << bits
    r = math.isqrt(n * scale * scale)
    return Fraction(r, den * scale), Fraction(r + 1, den * scale)


def _k_squared_times_4_bounds(ab: int, apbp: int, bits: int):
    """Interval for 4*K^2, K = 1 + sqrt(ab)/2 + sqrt(apbp)/2
    + sqrt((2+sqrt(ab))(2+sqrt(apbp)))."""
    xl, xh = _sqrt_bounds(Fraction(ab), bits)
    yl, yh = _sqrt_bounds(Fraction(apbp), bits)
    il, ih = _sqrt_bounds((2 + xl) * (2 + yl), bits)
    jl, jh = _sqrt_bounds((2 + xh) * (2 + yh), bits)
    kl = 1 + xl / 2 + yl / 2 + il
    kh = 1 + xh / 2 + yh / 2 + jh
    return 4 * kl * kl, 4 * kh * kh


def cc_bound_holds(A: int, B: int, Ap: int, Bp: int, C: int, Cp: int) -> bool:
    """Decide CC' < 4K^2 exactly.

    Rational K (all radicands perfect squares) is compared directly.
    Otherwise adaptive-precision interval arithmetic decides; a symbolic
    minimal-polynomial fallback covers the measure-zero straddling case.
    """
    ab, apbp = A * B, Ap * Bp
    t = C * Cp
    if is_perfect_square(ab) and is_perfect_square(apbp):
        x, y = math.isqrt(ab), math.isqrt(apbp)
        inner = (2 + x) * (2 + y)
        if is_perfect_square(inner):
            k = Fraction(2 + x + y, 2) + math.isqrt(inner)
            return t < 4 * k * k
    for bits in (32, 64, 128, 256, 512, 1024):
        lo, hi = _k_squared_times_4_bounds(ab, apbp, bits)
        if t < lo:
            return True
        if t > hi:
            return False
    # t sits inside a 2^-1024 window around 4K^2: settle symbolically.
    import sympy

    s = sympy.sqrt
    k = 1 + s(ab) / 2 + s(apbp) / 2 + s((2 + s(ab)) * (2 + s(apbp)))
    diff = sympy.nsimplify(4 * k ** 2 - t)
    if sympy.simplify(diff) == 0:
        return False
    return bool(sympy.simplify(diff) > 0)
