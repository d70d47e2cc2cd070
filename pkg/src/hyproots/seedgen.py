"""Seed Gram matrices: five families of 3x3/4x4/5x5 inner product matrices.

Each family is generated over finite parameter ranges forced by the side
constraints (product bounds, integrality of N and N', divisor conditions on
k and k', integrality of the two gamma quotients), normalized to integer
entries with gcd 1, and deduplicated on the normalized matrix.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .exact import Mat, cc_bound_holds, divisors, frac_str, parse_frac

# (A, B) with AB <= 4, ordered lexicographically
_SMALL_AB = tuple((a, b) for a in range(1, 5) for b in range(1, 4 // a + 1))
# (A, B) with 4 < AB < 36
_LARGE_AB = tuple((a, b) for a in range(1, 36)
                  for b in range(4 // a + 1, 35 // a + 1) if 4 < a * b < 36)


@dataclass(frozen=True, slots=True)
class SeedParams:
    """Parameters of one seed matrix; k and kp are None where not used."""

    family: int
    A: int
    B: int
    Ap: int
    Bp: int
    C: int
    Cp: int
    k: int | None = None
    kp: int | None = None

    @property
    def beta(self) -> int:
        return self.A * self.Bp * self.Cp

    @property
    def N(self) -> Fraction | None:
        if self.family < 3:
            return None
        return 4 + Fraction(4 * (self.C * self.Cp + self.beta + self.Ap * self.Bp),
                            self.A * self.B - 4)

    @property
    def Np(self) -> Fraction | None:
        if self.family != 5:
            return None
        return 4 + Fraction(4 * (self.C * self.Cp + self.beta + self.A * self.B),
                            self.Ap * self.Bp - 4)

    @property
    def gamma(self) -> Fraction | None:
        if self.family != 5:
            return None
        return _gamma(self.A, self.B, self.Ap, self.Bp, self.C, self.Cp,
                      self.k, self.kp)

    def tuple_key(self):
        return (self.family, self.A, self.B, self.Ap, self.Bp, self.C,
                self.Cp, self.k or 0, self.kp or 0)


@dataclass(frozen=True, slots=True)
class SeedMatrix:
    """A seed: its parameters and the scale-normalized integer Gram."""

    params: SeedParams
    gram: Mat


def _gamma(a, b, ap, bp, c, cp, k, kp) -> Fraction:
    beta = a * bp * cp
    ccp = c * cp
    inner = 2 + Fraction(beta, ccp) \
        - Fraction((2 * ccp + beta) ** 3, (a * b - 4) * (ap * bp - 4) * c * c * cp * cp)
    return Fraction(2 * beta, k * kp) * inner


def _normalize(rows) -> Mat:
    """Scale a rational matrix by a positive rational to integer gcd 1."""
    den = 1
    for row in rows:
        for x in row:
            d = Fraction(x).denominator
            den = den * d // math.gcd(den, d)
    num = 0
    ints = []
    for row in rows:
        r = []
        for x in row:
            f = Fraction(x)
            v = f.numerator * (den // f.denominator)
            num = math.gcd(num, v)
            r.append(v)
        ints.append(r)
    return tuple(tuple(v // num for v in row) for row in ints)


def max_cc(A: int, B: int, Ap: int, Bp: int) -> int:
    """Largest integer CC' satisfying CC' < 4K^2 for the given pair data."""
    ab, apbp = A * B, Ap * Bp
    x, y = math.sqrt(ab), math.sqrt(apbp)
    k = 1 + x / 2 + y / 2 + math.sqrt((2 + x) * (2 + y))
    t = int(4 * k * k) + 2
    while cc_bound_holds(A, B, Ap, Bp, t, 1):
        t += 1
    while t >= 1 and not cc_bound_holds(A, B, Ap, Bp, t, 1):
        t -= 1
    return t


def _coprime_ray(A: int, B: int, Ap: int, Bp: int) -> tuple[int, int]:
    """Primitive (C, C') direction solving AB'C' = A'BC."""
    p, q = A * Bp, Ap * B
    g = math.gcd(p, q)
    return p // g, q // g   # C = p/g * t, C' = q/g * t


def _family1() -> Iterator[tuple[SeedParams, Mat]]:
    for a, b in _SMALL_AB:
        cmax = max_cc(a, b, 0, 0)
        for c in range(1, cmax + 1):
            for cp in range(1, cmax // c + 1):
                par = SeedParams(1, a, b, 0, 0, c, cp)
                rows = ((2 * a * c, -a * b * c, -a * c * cp),
                        (-a * b * c, 2 * b * c, 0),
                        (-a * c * cp, 0, 2 * a * cp))
                yield par, rows


def _family2() -> Iterator[tuple[SeedParams, Mat]]:
    for a, b in _SMALL_AB:
        for ap, bp in _SMALL_AB:
            cmax = max_cc(a, b, ap, bp)
            cdir, cpdir = _coprime_ray(a, b, ap, bp)
            t = 1
            while cdir * cpdir * t * t <= cmax:
                c, cp = cdir * t, cpdir * t
                beta = a * bp * cp
                par = SeedParams(2, a, b, ap, bp, c, cp)
                rows = ((2 * a * bp, -a * b * bp, -beta),
                        (-a * b * bp, 2 * b * bp, -ap * bp * b),
                        (-beta, -ap * bp * b, 2 * ap * b))
                yield par, rows
                t += 1


def _family3() -> Iterator[tuple[SeedParams, Mat]]:
    for a, b in _LARGE_AB:
        cmax = max_cc(a, b, 0, 0)
        ab4 = a * b - 4
        for c in range(1, cmax + 1):
            lo = 4 // c + 1
            for cp in range(lo, cmax // c + 1):
                ccp = c * cp
                if (4 * ccp) % ab4:
                    continue
                n = 4 + 4 * ccp // ab4
                for k in divisors(n):
                    par = SeedParams(3, a, b, 0, 0, c, cp, k)
                    nk = Fraction(n, k)
                    rows = ((2 * a * c, 0, -a * b * c, -a * c * cp),
                            (0, 2 * a * cp * Fraction(n, k * k), 0, -a * cp * nk),
                            (-a * b * c, 0, 2 * b * c, 0),
                            (-a * c * cp, -a * cp * nk, 0, 2 * a * cp))
                    yield par, rows


def _family4() -> Iterator[tuple[SeedParams, Mat]]:
    for a, b in _LARGE_AB:
        ab4 = a * b - 4
        for ap, bp in _SMALL_AB:
            cmax = max_cc(a, b, ap, bp)
            cdir, cpdir = _coprime_ray(a, b, ap, bp)
            t = 1
            while cdir * cpdir * t * t <= cmax:
                c, cp = cdir * t, cpdir * t
                t += 1
                ccp = c * cp
                if ccp <= 4:
                    continue
                beta = a * bp * cp
                if (4 * (ccp + beta + ap * bp)) % ab4:
                    continue
                n = 4 + 4 * (ccp + beta + ap * bp) // ab4
                for k in divisors(n):
                    par = SeedParams(4, a, b, ap, bp, c, cp, k)
                    nk = Fraction(n, k)
                    rows = ((2 * a * bp, 0, -a * b * bp, -beta),
                            (0, 2 * ap * b * Fraction(n, k * k), 0, -ap * b * nk),
                            (-a * b * bp, 0, 2 * b * bp, -ap * bp * b),
                            (-beta, -ap * b * nk, -ap * bp * b, 2 * ap * b))
                    yield par, rows


def _family5() -> Iterator[tuple[SeedParams, Mat]]:
    for a, b in _LARGE_AB:
        ab4 = a * b - 4
        for ap, bp in _LARGE_AB:
            apbp4 = ap * bp - 4
            cmax = max_cc(a, b, ap, bp)
            cdir, cpdir = _coprime_ray(a, b, ap, bp)
            t = 1
            while cdir * cpdir * t * t <= cmax:
                c, cp = cdir * t, cpdir * t
                t += 1
                ccp = c * cp
                if ccp <= 4:
                    continue
                beta = a * bp * cp
                if (4 * (ccp + beta + ap * bp)) % ab4:
                    continue
                if (4 * (ccp + beta + a * b)) % apbp4:
                    continue
                n = 4 + 4 * (ccp + beta + ap * bp) // ab4
                np_ = 4 + 4 * (ccp + beta + a * b) // apbp4
                gamma_core = _gamma(a, b, ap, bp, c, cp, 1, 1)  # gamma * k * k'
                for k in divisors(n):
                    lhs1 = gamma_core * Fraction(k, ap * b * n)
                    for kp in divisors(np_):
                        if (lhs1 / kp).denominator != 1:
                            continue
                        if (gamma_core * Fraction(kp, k * a * bp * np_)).denominator != 1:
                            continue
                        par = SeedParams(5, a, b, ap, bp, c, cp, k, kp)
                        gam = gamma_core / (k * kp)
                        nk = Fraction(n, k)
                        npk = Fraction(np_, kp)
                        rows = ((2 * a * bp, 0, -a * b * bp, -a * bp * npk, -beta),
                                (0, 2 * ap * b * Fraction(n, k * k), 0, gam, -ap * b * nk),
                                (-a * b * bp, 0, 2 * b * bp, 0, -ap * bp * b),
                                (-a * bp * npk, gam, 0, 2 * a * bp * Fraction(np_, kp * kp), 0),
                                (-beta, -ap * b * nk, -ap * bp * b, 0, 2 * ap * b))
                        yield par, rows


_FAMILIES = {1: _family1, 2: _family2, 3: _family3, 4: _family4, 5: _family5}


def iter_seeds(families: Iterable[int] = (1, 2, 3, 4, 5)) -> Iterator[SeedMatrix]:
    """Stream all seed matrices in deterministic order.

    Order is (family, lexicographic parameters); matrices are normalized to
    integer entries with gcd 1 and deduplicated on the normalized matrix.
    """
    seen: set = set()
    for fam in sorted(families):
        for par, rows in _FAMILIES[fam]():
            gram = _normalize(rows)
            key = gram
            if key in seen:
                continue
            seen.add(key)
            yield SeedMatrix(par, gram)


def enumerate_seeds(families: Iterable[int] = (1, 2, 3, 4, 5)) -> list[SeedMatrix]:
    return list(iter_seeds(families))


def family_bounds(family: int) -> dict:
    """Finite search ranges for one family, with the bounds that force them."""
    if family in (1, 2):
        ab = list(_SMALL_AB)
        note = "AB <= 4" + (" and A'B' <= 4" if family == 2 else "")
    elif family in (3, 4, 5):
        ab = list(_LARGE_AB)
        note = "4 < AB < 36"
        if family == 4:
            note += "; A'B' <= 4"
        if family == 5:
            note += "; 4 < A'B' < 36"
    else:
        raise ValueError("family must be 1..5")
    out = {
        "family": family,
        "ab_pairs": ab,
        "ab_rule": note,
        "cc_rule": "CC' < 4K^2 (certified); CC' > 4 in families 3-5",
        "k_rule": None,
        "cc_max_examples": {},
    }
    if family in (3, 4, 5):
        out["k_rule"] = "k | N" + ("; k' | N'" if family == 5 else "")
    pairs = [(1, 1), (2, 2)] if family in (1, 3) else [(1, 1, 1, 1), (2, 2, 2, 2)]
    for p in pairs:
        if len(p) == 2:
            a, b = p
            ap = bp = 0
        else:
            a, b, ap, bp = p
        out["cc_max_examples"][f"A={a},B={b},A'={ap},B'={bp}"] = max_cc(a, b, ap, bp)
    return out


# --- serialization -------------------------------------------------------

def seed_to_json(seed: SeedMatrix) -> str:
    p = seed.params
    return json.dumps({
        "family": p.family,
        "A": p.A, "B": p.B, "Ap": p.Ap, "Bp": p.Bp,
        "C": p.C, "Cp": p.Cp, "k": p.k, "kp": p.kp,
        "gram": [[frac_str(x) for x in row] for row in seed.gram],
    }, separators=(",", ":"))


def seed_from_json(line: str) -> SeedMatrix:
    d = json.loads(line)
    par = SeedParams(d["family"], d["A"], d["B"], d["Ap"], d["Bp"],
                     d["C"], d["Cp"], d["k"], d["kp"])
    gram = tuple(tuple(int(parse_frac(x)) for x in row) for row in d["gram"])
    return SeedMatrix(par, gram)
