"""Chain search: seeds to chains, Weyl vectors, extensions, saturation.

A chain lives in an unscaled integral lattice E of signature (2,1): the
Gram matrix of E (in E's own basis), the root coordinate vectors, and the
Weyl vector.  The extension solver works in integer arithmetic throughout
and only touches rationals on the rare branch where the quadratic has a
rational solution.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .exact import (
    Mat,
    Vec,
    divisors,
    frac_str,
    mat_inv,
    parse_frac,
    rank_kernel,
    signature,
    smith_normal_form,
    solve_linear,
)
from .lattices import (
    LatticeInSpace,
    intermediate_lattices,
    reflective_hull,
    standard_lattice,
    unscale_gram,
)
from .seedgen import SeedMatrix


class ChainInvariantError(RuntimeError):
    """A constructed chain violates the chain conditions."""


class ExtensionAmbiguityError(RuntimeError):
    """More than one extension candidate survived the sign checks."""


class SaturationLimitError(RuntimeError):
    """Iteration budget exhausted; carries the state for a checkpoint dump."""

    def __init__(self, msg, closed, stats, open_chains):
        super().__init__(msg)
        self.closed = closed
        self.stats = stats
        self.open_chains = open_chains


@dataclass(frozen=True, slots=True)
class Chain:
    """Search state: lattice Gram, ordered roots, Weyl vector, closed flag."""

    gram: tuple[tuple[int, int, int], ...]
    roots: tuple[tuple[int, int, int], ...]
    rho_num: tuple[int, int, int]
    rho_den: int
    closed: bool = False

    def rho(self) -> tuple[Fraction, Fraction, Fraction]:
        d = self.rho_den
        return tuple(Fraction(n, d) for n in self.rho_num)


@dataclass(frozen=True, slots=True)
class CandidatePair:
    """Target (norm, inner product with the last root) for an extension."""

    N: int
    I: Fraction


def _gvec(g: Mat, v: Sequence[int]) -> tuple[int, int, int]:
    (a, b, c), (d, e, f), (h, i, j) = g
    x, y, z = v
    return (a * x + b * y + c * z,
            d * x + e * y + f * z,
            h * x + i * y + j * z)


def _gdot(g: Mat, u: Sequence[int], v: Sequence[int]) -> int:
    gv = _gvec(g, v)
    return u[0] * gv[0] + u[1] * gv[1] + u[2] * gv[2]


def weyl_vector(gram: Mat, roots: Sequence[Vec]) -> Optional[tuple[Fraction, ...]]:
    """The unique rho with rho.alpha = -alpha^2/2 for all roots, if any."""
    rows = []
    rhs = []
    for a in roots:
        row = tuple(sum(gram[i][j] * a[j] for j in range(len(a)))
                    for i in range(len(a)))
        rows.append(row)
        rhs.append(Fraction(-sum(a[i] * row[i] for i in range(len(a))), 2))
    return solve_linear(rows, rhs)


def _normalize_rho(rho: Sequence[Fraction]) -> tuple[tuple[int, int, int], int]:
    den = 1
    for f in rho:
        den = den * f.denominator // math.gcd(den, f.denominator)
    num = tuple(int(f * den) for f in rho)
    g = math.gcd(den, math.gcd(math.gcd(abs(num[0]), abs(num[1])), abs(num[2])))
    if g > 1:
        num = tuple(n // g for n in num)
        den //= g
    return num, den


def seed_status(seed: SeedMatrix) -> tuple[str, Optional[Chain]]:
    """Classify one seed: positive definite, rank 2, Weyl failure, or a chain.

    Statuses: "pos_def", "rank2", "no_weyl", "not_timelike", "ok".
    """
    m = seed.gram
    k = len(m)
    pos, neg, zero = signature(m)
    if neg == 0 and zero == 0:
        return "pos_def", None
    rank = pos + neg
    if rank == 2:
        return "rank2", None
    if (pos, neg) != (2, 1):
        raise ChainInvariantError(f"unexpected seed signature {(pos, neg, zero)}")
    if zero == 0:
        g3 = m
        roots = tuple((int(i == 0), int(i == 1), int(i == 2)) for i in range(3))
    else:
        _, kernel = rank_kernel(m)
        diag, _, right = smith_normal_form([list(v) for v in kernel])
        assert all(d == 1 for d in diag), "kernel basis must be saturated"
        rinv = mat_inv(right)
        base = [tuple(int(x) for x in rinv[r]) for r in range(k - 3, k)]
        g3 = tuple(
            tuple(sum(base[a][i] * m[i][j] * base[b][j]
                      for i in range(k) for j in range(k)) for b in range(3))
            for a in range(3)
        )
        roots = tuple(tuple(right[i][j] for j in range(k - 3, k)) for i in range(k))
        for i in range(k):
            for j in range(k):
                assert _gdot(g3, roots[i], roots[j]) == m[i][j]
    rho = weyl_vector(g3, roots)
    if rho is None:
        return "no_weyl", None
    rho_norm = sum(rho[i] * sum(g3[i][j] * rho[j] for j in range(3)) for i in range(3))
    if rho_norm >= 0:
        return "not_timelike", None
    for i in range(k):
        for j in range(i + 1, k):
            if m[i][j] > 0:
                raise ChainInvariantError("seed roots have a positive inner product")
    num, den = _normalize_rho(rho)
    return "ok", Chain(g3, roots, num, den)


def seed_to_chain(seed: SeedMatrix) -> Optional[Chain]:
    """Chain on the quotient lattice D, or None when the seed is discarded."""
    return seed_status(seed)[1]


def chain_enlargements(chain: Chain) -> list[Chain]:
    """One chain per lattice between D and the reflective hull of its roots,
    each rescaled so the lattice is unscaled."""
    dlat = standard_lattice(chain.gram)
    hull = reflective_hull(dlat.space, chain.roots)
    out = []
    for lat in intermediate_lattices(dlat, hull):
        gram_e, _ = unscale_gram(lat.gram())
        binv = mat_inv(lat.basis)
        roots_e = []
        for a in chain.roots:
            coords = tuple(sum(Fraction(a[i]) * binv[i][j] for i in range(3))
                           for j in range(3))
            assert all(c.denominator == 1 for c in coords)
            roots_e.append(tuple(int(c) for c in coords))
        rho = chain.rho()
        rho_e = tuple(sum(rho[i] * binv[i][j] for i in range(3)) for j in range(3))
        num, den = _normalize_rho(rho_e)
        out.append(Chain(tuple(tuple(int(x) for x in r) for r in gram_e),
                         tuple(roots_e), num, den))
    return out


def initial_chains(seeds: Iterable[SeedMatrix],
                   stats: dict | None = None,
                   par_map: Callable = map) -> Iterator[Chain]:
    """Stream the initial chains for all surviving seeds, counting discards."""
    counts = {"pos_def": 0, "rank2": 0, "no_weyl": 0, "not_timelike": 0, "ok": 0}
    total = 0
    n_chains = 0
    for status, chains in par_map(_seed_worker, seeds):
        total += 1
        counts[status] += 1
        if chains:
            n_chains += len(chains)
            yield from chains
    if stats is not None:
        stats["seeds_total"] = total
        stats["pos_def"] = counts["pos_def"]
        stats["rank2"] = counts["rank2"]
        stats["no_weyl"] = counts["no_weyl"]
        stats["not_timelike"] = counts["not_timelike"]
        stats["weyl_discarded"] = counts["no_weyl"] + counts["not_timelike"]
        stats["weyl_survivors"] = counts["ok"]
        stats["initial_chains"] = n_chains


def _seed_worker(seed: SeedMatrix):
    status, chain = seed_status(seed)
    if chain is None:
        return status, None
    return status, chain_enlargements(chain)


@lru_cache(maxsize=None)
def _norm_candidates(gram: Mat) -> tuple[int, ...]:
    diag, _, _ = smith_normal_form(gram)
    e = max(abs(d) for d in diag)
    return tuple(divisors(4 * e))


def root_norms(chain: Chain) -> tuple[int, ...]:
    return _norm_candidates(chain.gram)


def candidate_inner_products(m_norm: int, n_norm: int) -> list[Fraction]:
    """Admissible inner products of consecutive roots with norms m and n.

    Zero is always admissible; a negative I needs I^2 = j*m*n/4 for
    j in 1..4 (the finite/affine rank-2 angle classes) and I in both
    (m/2)Z and (n/2)Z.
    """
    out = [Fraction(0)]
    for i2 in _inner_candidates2(m_norm, n_norm):
        if i2:
            out.append(Fraction(i2, 2))
    return out


def _inner_candidates2(m_norm: int, n_norm: int) -> tuple[int, ...]:
    """Doubled inner products: 0 and each admissible negative 2I."""
    out = [0]
    mn = m_norm * n_norm
    for j in (1, 2, 3, 4):
        q = j * mn
        s = math.isqrt(q)
        if s * s == q and s % m_norm == 0 and s % n_norm == 0:
            out.append(-s)
    return tuple(out)


def find_extension(chain: Chain, pair: CandidatePair) -> Optional[tuple[int, int, int]]:
    """The unique extension root with the given norm and inner product, if any."""
    g = chain.gram
    w_list = [_gvec(g, a) for a in chain.roots]
    u = _gvec(g, chain.rho_num)
    i2 = pair.I * 2
    if i2.denominator != 1:
        return None
    return _solve_extension(g, w_list, u, chain.rho_den, pair.N, int(i2))


def _solve_extension(g, w_list, u, den, n_norm, i2):
    """Solve alpha.rho = -N/2, alpha.alpha_m = I, alpha^2 = N over E."""
    w = w_list[-1]
    # integer linear system: (2u).alpha = -N*den, (2w).alpha = 2I
    rhs0 = -n_norm * den
    rhs1 = i2
    d0 = u[1] * w[2] - u[2] * w[1]
    d1 = u[2] * w[0] - u[0] * w[2]
    d2 = u[0] * w[1] - u[1] * w[0]
    gd = math.gcd(math.gcd(abs(d0), abs(d1)), abs(d2))
    if gd == 0:
        raise ChainInvariantError("rho and the last root are linearly dependent")
    d = (d0 // gd, d1 // gd, d2 // gd)
    # particular solution from the largest 2x2 minor
    ad0, ad1, ad2 = abs(d0), abs(d1), abs(d2)
    if ad0 >= ad1 and ad0 >= ad2:
        c1, c2, c0 = 1, 2, 0
    elif ad1 >= ad2:
        c1, c2, c0 = 2, 0, 1
    else:
        c1, c2, c0 = 0, 1, 2
    a11, a12 = 2 * u[c1], 2 * u[c2]
    a21, a22 = 2 * w[c1], 2 * w[c2]
    det2 = a11 * a22 - a12 * a21
    pn = [0, 0, 0]
    pn[c1] = rhs0 * a22 - rhs1 * a12
    pn[c2] = a11 * rhs1 - a21 * rhs0
    pd = det2
    # quadratic a t^2 + 2 b t + (c - N) = 0 along alpha = p + t d
    aq = _gdot(g, d, d)
    assert aq > 0, "line direction must be spacelike"
    bq = _gdot(g, pn, d)
    cq = _gdot(g, pn, pn)
    disc = bq * bq - aq * (cq - n_norm * pd * pd)
    if disc < 0:
        return None
    s = math.isqrt(disc)
    if s * s != disc:
        return None
    denc = aq * pd
    survivors = []
    for tn in {-bq + s, -bq - s}:
        nums = (pn[0] * aq + tn * d[0], pn[1] * aq + tn * d[1], pn[2] * aq + tn * d[2])
        dd = denc
        if dd < 0:
            nums = (-nums[0], -nums[1], -nums[2])
            dd = -dd
        if all(nums[0] * wv[0] + nums[1] * wv[1] + nums[2] * wv[2] <= 0
               for wv in w_list):
            survivors.append((nums, dd))
    if len(survivors) > 1:
        raise ExtensionAmbiguityError(
            f"two candidates with nonpositive products for N={n_norm}, 2I={i2}")
    if not survivors:
        return None
    nums, dd = survivors[0]
    if any(x % dd for x in nums):
        return None
    alpha = (nums[0] // dd, nums[1] // dd, nums[2] // dd)
    gv = _gvec(g, alpha)
    if any((2 * x) % n_norm for x in gv):
        return None
    return alpha


def extensions(chain: Chain) -> list[Chain]:
    """All one-root extensions of a non-closed chain."""
    g = chain.gram
    w_list = [_gvec(g, a) for a in chain.roots]
    u = _gvec(g, chain.rho_num)
    last = chain.roots[-1]
    m_norm = last[0] * w_list[-1][0] + last[1] * w_list[-1][1] + last[2] * w_list[-1][2]
    out = []
    for n_norm in _norm_candidates(g):
        for i2 in _inner_candidates2(m_norm, n_norm):
            alpha = _solve_extension(g, w_list, u, chain.rho_den, n_norm, i2)
            if alpha is not None:
                out.append(replace(chain, roots=chain.roots + (alpha,)))
    return out


def is_closed(chain: Chain) -> bool:
    """True iff the span of the last and first roots is positive
    (semi)definite, i.e. the mirrors meet in H^2 or its boundary."""
    g = chain.gram
    first, last = chain.roots[0], chain.roots[-1]
    n1 = _gdot(g, first, first)
    nm = _gdot(g, last, last)
    ip = _gdot(g, last, first)
    return nm * n1 - ip * ip >= 0


def _step_worker(chain: Chain) -> tuple[bool, list[Chain]]:
    if is_closed(chain):
        return True, []
    return False, extensions(chain)


def saturate(initial: Iterable[Chain],
             max_iterations: int = 64,
             on_iteration: Callable | None = None,
             par_map: Callable = map) -> tuple[list[tuple[Chain, int]], list[tuple[int, int]]]:
    """Iterate close-or-extend until no extensions remain.

    Returns (closed chains tagged with their closing iteration, per-iteration
    (closed, extensions) counts).  Raises SaturationLimitError with the
    current state when max_iterations is exceeded.
    """
    open_chains = list(initial)
    closed: list[tuple[Chain, int]] = []
    stats: list[tuple[int, int]] = []
    iteration = 0
    while open_chains:
        iteration += 1
        if iteration > max_iterations:
            raise SaturationLimitError(
                f"no convergence after {max_iterations} iterations",
                closed, stats, open_chains)
        next_open: list[Chain] = []
        n_closed = 0
        for chain, (done, exts) in zip(open_chains, par_map(_step_worker, open_chains)):
            if done:
                closed.append((replace(chain, closed=True), iteration))
                n_closed += 1
            else:
                next_open.extend(exts)
        stats.append((n_closed, len(next_open)))
        if on_iteration is not None:
            on_iteration(iteration, closed, next_open, stats)
        open_chains = next_open
    return closed, stats


def validate_chain(chain: Chain) -> None:
    """Check every chain invariant; raises ChainInvariantError on failure."""
    g = chain.gram
    m = len(chain.roots)
    if m < 3:
        raise ChainInvariantError("a chain needs at least three roots")
    lat = standard_lattice(g)
    from .lattices import is_root as lattice_is_root

    for a in chain.roots:
        if not lattice_is_root(lat, a):
            raise ChainInvariantError(f"{a} is not a root of E")
    for i in range(m):
        for j in range(i + 1, m):
            if _gdot(g, chain.roots[i], chain.roots[j]) > 0:
                raise ChainInvariantError("roots must have nonpositive products")
    for i in range(m - 1):
        a, b = chain.roots[i], chain.roots[i + 1]
        if _gdot(g, a, a) * _gdot(g, b, b) - _gdot(g, a, b) ** 2 < 0:
            raise ChainInvariantError("consecutive span is indefinite")
    rho = chain.rho()
    for a in chain.roots:
        lhs = sum(rho[i] * sum(g[i][j] * a[j] for j in range(3)) for i in range(3))
        if lhs != Fraction(-_gdot(g, a, a), 2):
            raise ChainInvariantError("Weyl equation fails")
    rho_norm = sum(rho[i] * sum(g[i][j] * rho[j] for j in range(3)) for i in range(3))
    if rho_norm >= 0:
        raise ChainInvariantError("Weyl vector is not timelike")


# --- serialization -------------------------------------------------------

def chain_to_json(chain: Chain, iteration: int) -> str:
    return json.dumps({
        "iteration": iteration,
        "E_gram": [[frac_str(x) for x in row] for row in chain.gram],
        "roots": [list(r) for r in chain.roots],
        "rho": [frac_str(f) for f in chain.rho()],
        "closed": chain.closed,
    }, separators=(",", ":"))


def chain_from_json(line: str) -> tuple[Chain, int]:
    d = json.loads(line)
    gram = tuple(tuple(int(parse_frac(x)) for x in row) for row in d["E_gram"])
    roots = tuple(tuple(int(x) for x in r) for r in d["roots"])
    num, den = _normalize_rho([parse_frac(x) for x in d["rho"]])
    return Chain(gram, roots, num, den, bool(d["closed"])), int(d["iteration"])
