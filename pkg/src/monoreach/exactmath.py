"""Deterministic number kit: primality, portable random draws, dyadic logs.

Everything here is exact integer / Fraction arithmetic or consumes only
``random.Random.getrandbits``, so results are identical across platforms
and CPython versions.
"""

from __future__ import annotations

import hashlib
from fractions import Fraction
from math import comb, isqrt  # noqa: F401  (comb re-exported for callers)
from random import Random

# Fixed witness set: deterministic for n < 3.3e24, and a fixed-base
# pseudoprimality test beyond that (still deterministic output).
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n < 1_000_000:
        f = 49
        r = isqrt(n)
        while f <= r:
            if n % f == 0:
                return False
            f += 2
        return True
    # Miller-Rabin with fixed bases.
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime_at_least(x: int) -> int:
    q = max(2, x)
    while not is_prime(q):
        q += 1
    return q


def child_seed(master: int, label: str) -> int:
    """Derive a 64-bit sub-stream seed from a master seed and a label."""
    digest = hashlib.sha256(f"{master}|{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def randbelow(rng: Random, k: int) -> int:
    """Uniform integer in [0, k) built from getrandbits only."""
    if k <= 0:
        raise ValueError("k must be positive")
    bits = k.bit_length()
    while True:
        r = rng.getrandbits(bits)
        if r < k:
            return r


def sample_distinct(rng: Random, count: int, n: int) -> tuple[int, ...]:
    """Uniform `count`-subset of {1..n}, returned sorted.

    Partial Fisher-Yates over a sparse permutation; consumes only
    getrandbits via randbelow, so draws are reproducible.
    """
    if not 0 <= count <= n:
        raise ValueError("count out of range")
    swapped: dict[int, int] = {}
    picked = []
    for i in range(count):
        j = i + randbelow(rng, n - i)
        picked.append(swapped.get(j, j) + 1)
        swapped[j] = swapped.get(i, i)
    return tuple(sorted(picked))


_PROB_BITS = 24


def bernoulli_mask(rng: Random, width: int, p: float) -> int:
    """Integer with `width` independent bits, each 1 with probability ~p.

    p is quantized to a multiple of 2**-24.  Built from getrandbits by
    processing the quantized probability binary-digit by binary-digit
    (AND halves the density, OR averages it with one).
    """
    if width <= 0:
        return 0
    if p <= 0.0:
        return 0
    if p >= 1.0:
        return (1 << width) - 1
    q = round(p * (1 << _PROB_BITS))
    q = min(max(q, 1), (1 << _PROB_BITS) - 1)
    # Horner over the binary digits of q/2**B, least significant first:
    # a 0 digit halves the density (AND), a 1 digit averages with one (OR).
    # Trailing zero digits only AND into an all-zero mask and are skipped;
    # every digit above them, including leading zeros, must be processed.
    trailing = (q & -q).bit_length() - 1
    q >>= trailing
    acc = rng.getrandbits(width)
    q >>= 1
    for _ in range(_PROB_BITS - trailing - 1):
        r = rng.getrandbits(width)
        acc = (acc | r) if (q & 1) else (acc & r)
        q >>= 1
    return acc


# ---------------------------------------------------------------------------
# Dyadic (scaled-integer) real arithmetic.  All values are `value * 2**PREC`
# floors; errors are a handful of ulps, far below every comparison margin
# used by the depth reports.

PREC = 96
_GUARD = 32


def log2_scaled(x: int, prec: int = PREC) -> int:
    """floor-ish of log2(x) * 2**prec for an integer x >= 1 (error < 2**-90)."""
    if x < 1:
        raise ValueError("x must be >= 1")
    e0 = x.bit_length() - 1
    g = prec + _GUARD + 16
    y = (x << g) >> e0  # y/2**g in [1, 2)
    frac = 0
    for _ in range(prec):
        y = (y * y) >> g
        frac <<= 1
        if y >> (g + 1):
            frac |= 1
            y >>= 1
    return (e0 << prec) | frac


def log2_fraction(x: int, prec: int = PREC) -> Fraction:
    return Fraction(log2_scaled(x, prec), 1 << prec)


def ln2_scaled(prec: int = PREC) -> int:
    """ln(2) * 2**prec via the atanh(1/3) series, truncated when certified."""
    g = prec + _GUARD
    total = 0
    k = 0
    while True:
        term = (2 << g) // (3 ** (2 * k + 1) * (2 * k + 1))
        if term == 0:
            break
        total += term
        k += 1
    return total >> _GUARD


def ln_scaled(x: int, prec: int = PREC) -> int:
    """ln(x) * 2**prec for integer x >= 1."""
    return (log2_scaled(x, prec) * ln2_scaled(prec)) >> prec


def sqrt_scaled(value_scaled: int, prec: int = PREC) -> int:
    """floor of sqrt(v) * 2**prec where value_scaled = v * 2**prec."""
    if value_scaled < 0:
        raise ValueError("negative value")
    return isqrt(value_scaled << prec)


def _exp2_frac_scaled(frac_scaled: int, prec: int) -> int:
    # 2**f for f = frac_scaled / 2**prec in [0, 1), as a scaled integer.
    # Product over the square-root chain 2**(1/2), 2**(1/4), ...
    one = 1 << prec
    if frac_scaled == 0:
        return one
    root = isqrt(2 << (2 * prec))  # 2**(1/2) scaled
    acc = one
    for bit_index in range(1, prec + 1):
        if frac_scaled >> (prec - bit_index) & 1:
            acc = (acc * root) >> prec
        root = isqrt(root << prec)
    return acc


def floor_pow2(exponent_scaled: int, prec: int = PREC) -> int:
    """floor(2**e) for e = exponent_scaled / 2**prec >= 0.

    The fractional part is evaluated at two precisions; if the floors
    disagree the value sits too close to an integer to certify.
    """
    int_part = exponent_scaled >> prec
    frac = exponent_scaled & ((1 << prec) - 1)
    if frac == 0:
        return 1 << int_part
    lo = _exp2_frac_scaled(frac, prec)
    hi = lo + (prec * 4)  # generous ulp slack for the chain truncations
    flo = (lo << int_part) >> prec
    fhi = (hi << int_part) >> prec
    if flo != fhi:
        raise ArithmeticError("floor(2**e) not certifiable at this precision")
    return flo
