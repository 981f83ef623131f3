"""Product formulas for the alternating-sign-matrix counting sequences.

Three round-number sequences show up as normalizations and homogeneous
special values throughout the package:

* ``asm_count(L)``      A(L)   = prod_{i<L} (3i+1)! / (L+i)!
                        1, 2, 7, 42, 429, ...
* ``vsasm_count(2m+1)`` A_V    = prod_{i<m} (3i+2) (6i+3)! (2i+1)! / ((4i+2)! (4i+3)!)
                        1, 1, 3, 26, 646, 45885, ...  (odd arguments only)
* ``csscpp_count(2m)``  N_8    = prod_{i<m} (3i+1) (6i)! (2i)! / ((4i)! (4i+1)!)
                        1, 2, 11, 170, 7429, 920460, ...  (even arguments only)

Two evaluation routes are kept deliberately.  Small arguments go through
exact ``Fraction`` accumulation of the literal products, asserting that
the result is an integer (the individual factors are not).  Large
arguments (the asymptotics path goes up to L ~ 4000, where the counts
have millions of digits) use prime-exponent vectors: the p-adic
valuation of each factorial product is a lattice-point count evaluated
in O(log) time, and ratios of counts are formed by differencing
exponents before anything is ever multiplied out.  The two routes are
cross-checked in the tests on overlapping arguments.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

_RATIONAL_CUTOFF = 120  # product route below, exponent route above


# ---------------------------------------------------------------------------
# exact rational products


def _rational_asm(L: int) -> int:
    r = Fraction(1)
    for i in range(L):
        r *= Fraction(math.factorial(3 * i + 1), math.factorial(L + i))
    assert r.denominator == 1, f"A({L}) product is not integral"
    return r.numerator


def _rational_vsasm(L: int) -> int:
    m = (L - 1) // 2
    r = Fraction(1)
    for i in range(m):
        r *= Fraction(
            (3 * i + 2) * math.factorial(6 * i + 3) * math.factorial(2 * i + 1),
            math.factorial(4 * i + 2) * math.factorial(4 * i + 3),
        )
    assert r.denominator == 1, f"A_V({L}) product is not integral"
    return r.numerator


def _rational_csscpp(L: int) -> int:
    m = L // 2
    r = Fraction(1)
    for i in range(m):
        r *= Fraction(
            (3 * i + 1) * math.factorial(6 * i) * math.factorial(2 * i),
            math.factorial(4 * i) * math.factorial(4 * i + 1),
        )
    assert r.denominator == 1, f"N_8({L}) product is not integral"
    return r.numerator


# ---------------------------------------------------------------------------
# prime-exponent route


def floor_sum(n: int, m: int, a: int, b: int) -> int:
    """sum_{i=0}^{n-1} floor((a*i + b) / m), for nonnegative a, b."""
    ans = 0
    while True:
        if a >= m:
            ans += (n - 1) * n // 2 * (a // m)
            a %= m
        if b >= m:
            ans += n * (b // m)
            b %= m
        y_max = a * n + b
        if y_max < m:
            return ans
        n, b, m, a = y_max // m, y_max % m, a, m


@lru_cache(maxsize=None)
def _primes_upto(n: int) -> tuple:
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return tuple(i for i in range(2, n + 1) if sieve[i])


def _vp_factorial_sum(p: int, a: int, b: int, m: int) -> int:
    """v_p( prod_{i<m} (a*i + b)! ) via Legendre's formula summed over i."""
    if m <= 0:
        return 0
    top = a * (m - 1) + b
    e, pk = 0, p
    while pk <= top:
        e += floor_sum(m, pk, a, b)
        pk *= p
    return e


def _vp_progression(p: int, a: int, b: int, m: int) -> int:
    """v_p( prod_{i<m} (a*i + b) ) for a, b > 0."""
    if m <= 0:
        return 0
    top = a * (m - 1) + b
    e, pk = 0, p
    while pk <= top:
        g = math.gcd(a, pk)
        if b % g:
            break  # a*i + b never divisible by pk (nor higher powers)
        aa, bb, mk = a // g, b // g, pk // g
        if mk == 1:
            e += m
        else:
            i0 = (-bb * pow(aa, -1, mk)) % mk
            if i0 < m:
                e += (m - 1 - i0) // mk + 1
        pk *= p
    return e


def _exponents_asm(L: int) -> dict:
    top = max(3 * L - 2, 2 * L - 1, 1)
    out = {}
    for p in _primes_upto(top):
        e = _vp_factorial_sum(p, 3, 1, L) - _vp_factorial_sum(p, 1, L, L)
        if e:
            out[p] = e
    return out


def _exponents_vsasm(L: int) -> dict:
    m = (L - 1) // 2
    top = max(6 * m - 3, 3 * m - 1, 1) if m else 1
    out = {}
    for p in _primes_upto(top):
        e = (
            _vp_progression(p, 3, 2, m)
            + _vp_factorial_sum(p, 6, 3, m)
            + _vp_factorial_sum(p, 2, 1, m)
            - _vp_factorial_sum(p, 4, 2, m)
            - _vp_factorial_sum(p, 4, 3, m)
        )
        if e:
            out[p] = e
    return out


def _exponents_csscpp(L: int) -> dict:
    m = L // 2
    top = max(6 * m - 6, 4 * m - 3, 3 * m - 2, 2) if m else 2
    out = {}
    for p in _primes_upto(top):
        e = (
            _vp_progression(p, 3, 1, m)
            + _vp_factorial_sum(p, 6, 0, m)
            + _vp_factorial_sum(p, 2, 0, m)
            - _vp_factorial_sum(p, 4, 0, m)
            - _vp_factorial_sum(p, 4, 1, m)
        )
        if e:
            out[p] = e
    return out


_KINDS = {
    "asm": (_rational_asm, _exponents_asm),
    "vsasm": (_rational_vsasm, _exponents_vsasm),
    "csscpp": (_rational_csscpp, _exponents_csscpp),
}


@lru_cache(maxsize=None)
def sequence_exponents(kind: str, L: int):
    """Prime factorization of a count as a tuple of (prime, exponent) pairs."""
    exps = _KINDS[kind][1](L)
    assert all(e >= 0 for e in exps.values()), f"{kind}({L}) is not integral"
    return tuple(sorted(exps.items()))


@lru_cache(maxsize=None)
def _count(kind: str, L: int) -> int:
    if L <= _RATIONAL_CUTOFF:
        return _KINDS[kind][0](L)
    v = 1
    for p, e in sequence_exponents(kind, L):
        v *= p**e
    return v


def asm_count(L: int) -> int:
    if L < 0:
        raise ValueError("need L >= 0")
    return _count("asm", L)


def vsasm_count(L: int) -> int:
    """Vertically symmetric count; defined for odd L >= 1."""
    if L < 1 or L % 2 == 0:
        raise ValueError("vsasm_count takes odd L >= 1")
    return _count("vsasm", L)


def csscpp_count(L: int) -> int:
    """Cyclically symmetric transpose-complement count; even L >= 0."""
    if L < 0 or L % 2:
        raise ValueError("csscpp_count takes even L >= 0")
    return _count("csscpp", L)


def count_log(kind: str, L: int) -> float:
    """Natural log of a count, usable far beyond integer-size comfort."""
    return math.fsum(e * math.log(p) for p, e in sequence_exponents(kind, L))


def combine_exponents(terms) -> dict:
    """Signed sum of count factorizations: terms is [(kind, L, coeff), ...].

    Differencing exponents before taking any log keeps the huge
    individual factorizations from ever meeting a float.
    """
    acc: dict = {}
    for kind, L, coeff in terms:
        for p, e in sequence_exponents(kind, L):
            acc[p] = acc.get(p, 0) + coeff * e
    return {p: e for p, e in acc.items() if e}


def exponents_to_fraction(exps: dict) -> Fraction:
    num = den = 1
    for p, e in exps.items():
        if e >= 0:
            num *= p**e
        else:
            den *= p ** (-e)
    return Fraction(num, den)


def exponents_to_log(exps: dict) -> float:
    return math.fsum(e * math.log(p) for p, e in exps.items())
