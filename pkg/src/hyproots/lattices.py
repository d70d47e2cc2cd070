"""Lattices in a rational quadratic space.

Roots, reflective hulls, overlattice enumeration, discriminant data and a
genus-style grouping invariant.  A lattice is held as a full-rank basis
(rows) inside a QSpace carrying the symmetric Gram form.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import (
    Mat,
    Vec,
    divisors,
    factorize,
    frac_str,
    gram_product,
    is_symmetric,
    mat_det,
    mat_from_rows,
    mat_inv,
    mat_mul,
    mat_vec,
    signature,
    smith_normal_form,
    transpose,
)


@dataclass(frozen=True)
class QSpace:
    """A rational quadratic space of a given dimension."""

    dim: int
    gram: Mat

    def __post_init__(self):
        if len(self.gram) != self.dim or not is_symmetric(self.gram):
            raise ValueError("space Gram must be symmetric of the given dimension")


@dataclass(frozen=True)
class LatticeInSpace:
    """A full-rank lattice given by basis rows in space coordinates."""

    space: QSpace
    basis: Mat

    def gram(self) -> Mat:
        """Gram matrix of the basis vectors."""
        return mat_mul(mat_mul(self.basis, self.space.gram), transpose(self.basis))


def standard_lattice(gram: Mat) -> LatticeInSpace:
    """The lattice Z^n with the given Gram form in its own coordinates."""
    n = len(gram)
    basis = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    return LatticeInSpace(QSpace(n, mat_from_rows(gram)), basis)


def is_integral(lat: LatticeInSpace) -> bool:
    return all(Fraction(x).denominator == 1 for row in lat.gram() for x in row)


def _content(gram: Mat) -> Fraction:
    """gcd of all inner products of the lattice, as a positive rational."""
    den = 1
    for row in gram:
        for x in row:
            d = Fraction(x).denominator
            den = den * d // math.gcd(den, d)
    num = 0
    for row in gram:
        for x in row:
            f = Fraction(x)
            num = math.gcd(num, f.numerator * (den // f.denominator))
    if num == 0:
        raise ValueError("zero form has no content")
    return Fraction(num, den)


def unscale(lat: LatticeInSpace) -> tuple[LatticeInSpace, Fraction]:
    """Rescale the form so the lattice is integral with inner-product gcd 1.

    Returns the rescaled lattice and the factor the form was multiplied by.
    """
    factor = 1 / _content(lat.gram())
    new_gram = tuple(tuple(Fraction(x) * factor for x in row)
                     for row in lat.space.gram)
    return LatticeInSpace(QSpace(lat.space.dim, new_gram), lat.basis), factor


def unscale_gram(gram: Mat) -> tuple[Mat, Fraction]:
    """Same as unscale but acting directly on a Gram matrix."""
    factor = 1 / _content(gram)
    return tuple(tuple(int(Fraction(x) * factor) for x in row) for row in gram), factor


def is_root(lat: LatticeInSpace, v: Vec) -> bool:
    """True iff v (integer coordinates in lat's basis) has positive norm and
    pairs with every lattice vector into (v^2/2) Z."""
    if any(int(c) != c for c in v):
        raise ValueError("v must have integer coordinates in the lattice basis")
    g = lat.gram()
    norm = Fraction(gram_product(g, v, v))
    if norm <= 0:
        return False
    half = norm / 2
    return all(Fraction(x) % half == 0 for x in mat_vec(g, v))


def reflective_hull(space: QSpace, roots: Sequence[Vec]) -> LatticeInSpace:
    """The maximal lattice in which all the given roots are roots.

    Solves x.alpha_i in (alpha_i^2/2) Z for all i by clearing denominators
    and running Smith reduction; the roots must span and have positive norm.
    """
    n = space.dim
    g = space.gram
    w_rows = []
    for a in roots:
        norm = gram_product(g, a, a)
        if norm <= 0:
            raise ValueError("hull requires positive-norm roots")
        ga = mat_vec(g, a)
        w_rows.append(tuple(Fraction(2 * x, norm) for x in ga))
    den = 1
    for row in w_rows:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    w_int = [[int(x * den) for x in row] for row in w_rows]
    diag, _, right = smith_normal_form(w_int)
    if sum(1 for d in diag if d) != n:
        raise ValueError("roots do not span the space")
    # hull = { x = R y : y_j in (den/s_j) Z }, basis rows are scaled R columns
    basis = tuple(
        tuple(Fraction(den * right[i][j], diag[j]) for i in range(n))
        for j in range(n)
    )
    return LatticeInSpace(space, basis)


def _hnf_transversals(t: Sequence[int]) -> Iterable[tuple[tuple[int, ...], ...]]:
    """All row-HNF bases of lattices between diag(t) Z^3 and Z^3."""
    t1, t2, t3 = t
    for f in divisors(t3):
        for d in divisors(t2):
            for a in divisors(t1):
                x = t1 // a
                for e in range(f):
                    if (t2 // d * e) % f:
                        continue
                    for b in range(d):
                        if (x * b) % d:
                            continue
                        y = x * b // d
                        for c in range(f):
                            if (x * c - y * e) % f == 0:
                                yield ((a, b, c), (0, d, e), (0, 0, f))


def intermediate_lattices(dlat: LatticeInSpace, hull: LatticeInSpace) -> list[LatticeInSpace]:
    """All lattices between dlat and hull (one per subgroup of hull/dlat)."""
    hull_inv = mat_inv(hull.basis)
    m = mat_mul(dlat.basis, hull_inv)  # dlat basis in hull coordinates
    m_int = []
    for row in m:
        r = []
        for x in row:
            f = Fraction(x)
            if f.denominator != 1:
                raise ValueError("dlat is not contained in hull")
            r.append(f.numerator)
        m_int.append(r)
    diag, _, right = smith_normal_form(m_int)
    if any(d == 0 for d in diag):
        raise ValueError("dlat and hull must have equal rank")
    right_inv = mat_inv(right)
    out = []
    for rows in _hnf_transversals(diag):
        basis_hull = mat_mul(rows, right_inv)      # back from twisted coords
        basis_space = mat_mul(basis_hull, hull.basis)
        out.append(LatticeInSpace(dlat.space, basis_space))
    return out


def _integral_gram(lat_or_gram) -> list[list[int]]:
    gram = lat_or_gram.gram() if isinstance(lat_or_gram, LatticeInSpace) else lat_or_gram
    out = []
    for row in gram:
        r = []
        for x in row:
            f = Fraction(x)
            if f.denominator != 1:
                raise ValueError("an integral lattice is required")
            r.append(f.numerator)
        out.append(r)
    return out


def discriminant_data(lat_or_gram) -> tuple[list[int], int]:
    """Invariant factors of the discriminant group and the largest one."""
    diag, _, _ = smith_normal_form(_integral_gram(lat_or_gram))
    divs = [abs(d) for d in diag]
    if any(d == 0 for d in divs):
        raise ValueError("lattice form is degenerate")
    return divs, max(divs)


def root_norm_candidates(lat_or_gram) -> list[int]:
    """All positive divisors of 4e, e the largest elementary divisor."""
    _, e_max = discriminant_data(lat_or_gram)
    return divisors(4 * e_max)


# --- genus-style grouping key -------------------------------------------

def _val(f: Fraction, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    v = 0
    n = f.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = f.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def _unit_part(f: Fraction, p: int) -> Fraction:
    return f / Fraction(p) ** _val(f, p)


def _legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def _mod8(f: Fraction) -> int:
    """Residue mod 8 of a 2-adic unit given as a rational with odd parts."""
    return f.numerator * pow(f.denominator, -1, 8) % 8


def _jordan_split(gram: Mat, p: int) -> list[tuple[int, list[Fraction], list[Mat]]]:
    """p-adic Jordan decomposition.

    Returns, per scale exponent, the unit parts of the 1x1 constituents and
    (only for p = 2) the residual even 2x2 blocks divided by the scale.
    """
    n = len(gram)
    a = [[Fraction(x) for x in row] for row in gram]
    active = list(range(n))
    ones: list[tuple[int, Fraction]] = []
    twos: list[tuple[int, Mat]] = []
    while active:
        vmin = min(_val(a[i][j], p) for i in active for j in active if a[i][j] != 0)
        diag_hit = next((i for i in active
                         if a[i][i] != 0 and _val(a[i][i], p) == vmin), None)
        if diag_hit is not None:
            i = diag_hit
            d = a[i][i]
            active.remove(i)
            col = {r: a[r][i] for r in active}
            for r in active:
                fr = col[r]
                if fr:
                    f = fr / d
                    for c in active:
                        a[r][c] -= f * a[i][c]
            ones.append((vmin, _unit_part(d, p)))
            continue
        i, j = next((i, j) for i in active for j in active
                    if i != j and a[i][j] != 0 and _val(a[i][j], p) == vmin)
        if p != 2:
            # odd p: adding row+column j to i puts the minimum on the diagonal
            for c in active:
                a[i][c] += a[j][c]
            for r in active:
                a[r][i] += a[r][j]
            continue
        # p = 2: split an even 2x2 block by its Schur complement
        block = ((a[i][i], a[i][j]), (a[j][i], a[j][j]))
        det = block[0][0] * block[1][1] - block[0][1] * block[1][0]
        active.remove(i)
        active.remove(j)
        bi = {r: a[r][i] for r in active}
        bj = {r: a[r][j] for r in active}
        for r in active:
            x = (bi[r] * block[1][1] - bj[r] * block[0][1]) / det
            y = (bj[r] * block[0][0] - bi[r] * block[1][0]) / det
            for c in active:
                a[r][c] -= x * a[i][c] + y * a[j][c]
        scale = Fraction(2) ** vmin
        twos.append((vmin, tuple(tuple(x / scale for x in row) for row in block)))
    scales = sorted({v for v, _ in ones} | {v for v, _ in twos})
    return [(v,
             [u for w, u in ones if w == v],
             [b for w, b in twos if w == v]) for v in scales]


def _diagonalize_two_adic(units: list[Fraction], blocks: list[Mat]) -> list[Fraction]:
    """Fully diagonalize a single odd (type I) 2-adic Jordan block given its
    unit diagonal entries and residual even 2x2 pieces."""
    out = list(units)
    for blk in blocks:
        u = out.pop()
        g = ((u, Fraction(0), Fraction(0)),
             (Fraction(0), blk[0][0], blk[0][1]),
             (Fraction(0), blk[1][0], blk[1][1]))
        # e1 -> e1 + f1 creates an odd diagonal inside the even piece
        ch = ((1, 1, 0), (0, 1, 0), (0, 0, 1))
        g = mat_mul(mat_mul(ch, g), transpose(ch))
        split = _jordan_split(g, 2)
        assert len(split) == 1 and split[0][0] == 0 and not split[0][2], \
            "odd unimodular 2-adic forms must diagonalize"
        out.extend(split[0][1])
    return out


def _two_adic_symbol(gram: Mat) -> dict:
    """Per-scale 2-adic data.

    (scale, rank, type) is always an invariant and always included.  The
    finer det-mod-8 and oddity are invariant exactly when the form has a
    single Jordan scale (no sign walking or oddity fusion is possible), so
    they are included only then; the "detail" marker records which case.
    """
    split = _jordan_split(gram, 2)
    blocks = []
    for v, units, evens in split:
        rank = len(units) + 2 * len(evens)
        blocks.append([v, rank, "I" if units else "II"])
    sym: dict = {"blocks": blocks}
    if len(split) == 1:
        v, units, evens = split[0]
        det_unit = Fraction(1)
        for u in units:
            det_unit *= u
        for b in evens:
            det_unit *= b[0][0] * b[1][1] - b[0][1] * b[0][1]
        sym["det8"] = _mod8(det_unit)
        if units:
            diag = _diagonalize_two_adic(units, evens)
            sym["oddity"] = sum(_mod8(u) for u in diag) % 8
        else:
            sym["oddity"] = None
        sym["detail"] = "full"
    else:
        sym["det8"] = None
        sym["oddity"] = None
        sym["detail"] = "partial"
    return sym


def _odd_symbol(gram: Mat, p: int) -> list[list]:
    split = _jordan_split(gram, p)
    out = []
    for v, units, evens in split:
        assert not evens, "even blocks only occur at p = 2"
        prod = Fraction(1)
        for u in units:
            prod *= u
        eps = _legendre(prod.numerator * prod.denominator, p)
        out.append([v, len(units), eps])
    return out


def _hilbert2(a: Fraction, b: Fraction) -> int:
    """Hilbert symbol (a, b) over Q_2."""
    al, u = _val(a, 2), _unit_part(a, 2)
    bl, v = _val(b, 2), _unit_part(b, 2)
    um, vm = _mod8(u), _mod8(v)
    eu, ev = (um - 1) // 2 % 2, (vm - 1) // 2 % 2
    wu, wv = (um * um - 1) // 8 % 2, (vm * vm - 1) // 8 % 2
    exp = eu * ev + al * wv + bl * wu
    return -1 if exp % 2 else 1


def _rational_diagonal(gram: Mat) -> list[Fraction]:
    """Diagonal of some rational congruence diagonalization."""
    n = len(gram)
    a = [[Fraction(x) for x in row] for row in gram]
    active = list(range(n))
    out = []
    while active:
        piv = next((i for i in active if a[i][i] != 0), None)
        if piv is None:
            off = next(((i, j) for i in active for j in active
                        if j > i and a[i][j] != 0), None)
            if off is None:
                raise ValueError("degenerate form")
            i, j = off
            for c in active:
                a[i][c] += a[j][c]
            for r in active:
                a[r][i] += a[r][j]
            piv = i
        d = a[piv][piv]
        out.append(d)
        active.remove(piv)
        col = {r: a[r][piv] for r in active}
        for r in active:
            fr = col[r]
            if fr:
                f = fr / d
                for c in active:
                    a[r][c] -= f * a[piv][c]
    return out


@dataclass(frozen=True)
class GenusKey:
    """Deterministic isometry invariant used to group root lattices.

    Contains strictly invariant content only: signature, determinant,
    elementary divisors, full odd-p Jordan symbols, per-scale 2-adic
    (scale, rank, type) plus the 2-adic Hasse symbol, and the finer 2-adic
    block data exactly when unambiguous (single Jordan scale).  For forms
    with several 2-adic scales the key may be coarser than the genus; the
    "partial" detail marker lets reports flag those cases.
    """

    signature: tuple[int, int]
    determinant: Fraction
    elementary_divisors: tuple[int, ...]
    local: str  # canonical JSON of the local data

    def to_json(self) -> str:
        return json.dumps(
            {
                "signature": list(self.signature),
                "determinant": frac_str(self.determinant),
                "elementary_divisors": list(self.elementary_divisors),
                "local": json.loads(self.local),
            },
            sort_keys=True,
            separators=(",", ":"),
        )


def genus_key(lat_or_gram) -> GenusKey:
    """Grouping invariant of an integral, unscaled lattice."""
    gram = mat_from_rows(_integral_gram(lat_or_gram))
    pos, neg, zero = signature(gram)
    if zero:
        raise ValueError("genus key requires a nondegenerate lattice")
    divs, _ = discriminant_data(gram)
    det = mat_det(gram)
    diag = _rational_diagonal(gram)
    hasse2 = 1
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            hasse2 *= _hilbert2(diag[i], diag[j])
    local = {"2": dict(_two_adic_symbol(gram), hasse=hasse2)}
    for p in sorted(factorize(det.numerator)):
        if p != 2:
            local[str(p)] = {"blocks": _odd_symbol(gram, p)}
    return GenusKey(
        signature=(pos, neg),
        determinant=det,
        elementary_divisors=tuple(divs),
        local=json.dumps(local, sort_keys=True, separators=(",", ":")),
    )
