"""Covering set families: sampling, exact/sampled checking, affine planes.

A family (S_1..S_m) of subsets of {1..n} with declared parameters
(n, m, s, l, d) is *covering* when every subfamily of at least m*d/l sets
covers at least n-d+1 elements.  The checkers work through the equivalent
dual form: no d-element set D may be avoided by m*d/l or more of the S_i.
The threshold is compared as an exact rational, never rounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from random import Random

from .errors import (
    BudgetExceededError,
    FamilyViolationError,
    InvalidParameterError,
)
from .exactmath import comb, is_prime, isqrt, sample_distinct


@dataclass(frozen=True)
class FamilyParams:
    n: int
    m: int
    s: int
    l: int
    d: int

    def __post_init__(self):
        if min(self.n, self.m, self.s, self.l, self.d) < 1:
            raise InvalidParameterError(f"family parameters must be positive: {self}")
        if self.d > self.n:
            raise InvalidParameterError(f"deficiency d={self.d} exceeds universe n={self.n}")

    def threshold(self) -> Fraction:
        """Subfamily-size threshold m*d/l as an exact rational."""
        return Fraction(self.m * self.d, self.l)


class CoveringFamily:
    """Ordered list of subsets of {1..n} plus declared parameters.

    The cheap conditions (set sizes, element range, count) are enforced at
    construction.  The covering condition itself is established by
    check_family_exact / check_family_sampled.
    """

    def __init__(self, params: FamilyParams, sets):
        sets = tuple(tuple(sorted(set(s))) for s in sets)
        if len(sets) != params.m:
            raise InvalidParameterError(f"declared m={params.m} but got {len(sets)} sets")
        for idx, s in enumerate(sets):
            if len(s) > params.s:
                raise InvalidParameterError(f"set {idx} has {len(s)} > s={params.s} elements")
            if s and not (1 <= s[0] and s[-1] <= params.n):
                raise InvalidParameterError(f"set {idx} leaves the universe 1..{params.n}")
        self.params = params
        self.sets = sets

    def element_set_masks(self) -> list[int]:
        """For each element v of 1..n, the bitmask of set indices containing v."""
        masks = [0] * (self.params.n + 1)
        for idx, s in enumerate(self.sets):
            bit = 1 << idx
            for v in s:
                masks[v] |= bit
        return masks

    def __eq__(self, other):
        return (
            isinstance(other, CoveringFamily)
            and self.params == other.params
            and self.sets == other.sets
        )

    def __repr__(self):
        return f"CoveringFamily({self.params}, {len(self.sets)} sets)"


@dataclass(frozen=True)
class FamilyCounterexample:
    """A d-subset avoided by at least m*d/l sets (a covering violation)."""

    d_subset: tuple[int, ...]
    set_indices: tuple[int, ...]
    disjoint_count: int
    threshold: Fraction


def _violation_at(family: CoveringFamily, d_subset, elem_masks, full_mask) -> FamilyCounterexample | None:
    p = family.params
    avoid = 0
    for v in d_subset:
        avoid |= elem_masks[v]
    disjoint = full_mask & ~avoid
    count = disjoint.bit_count()
    if count * p.l >= p.m * p.d:
        indices = tuple(i for i in range(p.m) if (disjoint >> i) & 1)
        return FamilyCounterexample(tuple(d_subset), indices, count, p.threshold())
    return None


def check_family_exact(family: CoveringFamily, max_subsets: int = 10_000_000) -> FamilyCounterexample | None:
    """Decide the covering condition by enumerating every d-subset of {1..n}.

    Returns None on pass, else the lexicographically first counterexample.
    Refuses (never silently samples) when C(n, d) exceeds the budget.
    """
    p = family.params
    cost = comb(p.n, p.d)
    if cost > max_subsets:
        raise BudgetExceededError(
            f"exact check needs C({p.n},{p.d}) = {cost} subset evaluations, over budget {max_subsets}"
        )
    elem_masks = family.element_set_masks()
    full = (1 << p.m) - 1
    for combo in combinations(range(1, p.n + 1), p.d):
        bad = _violation_at(family, combo, elem_masks, full)
        if bad is not None:
            return bad
    return None


def check_family_sampled(family: CoveringFamily, trials: int, seed: int) -> FamilyCounterexample | None:
    """Monte Carlo falsification over uniform d-subsets.

    Finding nothing is not a proof; any counterexample returned is real.
    """
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    p = family.params
    elem_masks = family.element_set_masks()
    full = (1 << p.m) - 1
    rng = Random(seed)
    for _ in range(trials):
        d_subset = sample_distinct(rng, p.d, p.n)
        bad = _violation_at(family, d_subset, elem_masks, full)
        if bad is not None:
            return bad
    return None


def sampling_log_failure_bound(n: int, m: int, s: int, l: int, d: int) -> float:
    """Log of the failure-probability bound for the uniform row sampler.

    Negative values guarantee a covering family exists among the sampled
    candidates; exp of this value bounds the per-sample failure probability.
    Takes plain integers so out-of-domain probes (s = 0, d > n) evaluate too.
    """
    return d * m * math.log(m) / l + d * math.log(n) - s * m * d * d / (n * l)


def sampling_failure_bound(n: int, m: int, s: int, l: int, d: int) -> float:
    try:
        return math.exp(sampling_log_failure_bound(n, m, s, l, d))
    except OverflowError:
        return math.inf


def sampling_guarantee_holds(n: int, m: int, s: int, l: int, d: int) -> bool:
    """Sufficient condition for the sampler: m = n, l < n, s > 2n ln(n)/d."""
    return m == n and l < n and d <= n and s > 2.0 * n * math.log(n) / d


def sample_family(params: FamilyParams, seed: int) -> CoveringFamily:
    """Draw an m x s matrix of uniform elements of {1..n}, one set per row.

    Duplicates within a row collapse, so sets may have fewer than s
    elements.  Entries are drawn row-major from a fresh generator, so a
    fixed seed reproduces the family exactly.
    """
    rng = Random(seed)
    n = params.n
    rows = []
    for _ in range(params.m):
        row = [_uniform_element(rng, n) for _ in range(params.s)]
        rows.append(row)
    return CoveringFamily(params, rows)


def _uniform_element(rng: Random, n: int) -> int:
    bits = n.bit_length()
    while True:
        r = rng.getrandbits(bits)
        if r < n:
            return r + 1


def augment_with_terminals(family: CoveringFamily, source: int = 1, sink: int | None = None) -> CoveringFamily:
    """Add the source and sink vertices to every set; s is re-declared s+2."""
    p = family.params
    if sink is None:
        sink = p.n
    new_params = FamilyParams(p.n, p.m, p.s + 2, p.l, p.d)
    new_sets = [sorted(set(s) | {source, sink}) for s in family.sets]
    return CoveringFamily(new_params, new_sets)


@dataclass(frozen=True)
class HittingWitness:
    """Block-hitting witness for one vertex sequence against one family.

    indices = 0 = i_0 < i_1 < ... < i_k = l', with every interior sequence
    element in the chosen set, k <= l/d, and consecutive gaps <= 2d.
    """

    set_index: int
    indices: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.indices) - 1


def hitting_decomposition(family: CoveringFamily, vertex_sequence) -> HittingWitness:
    """Pick a set meeting every d-block of the sequence and one index per block.

    For sequences no longer than 2d the trivial two-endpoint witness with
    the first set suffices.  Failure to find a hitting set is itself a
    covering-condition counterexample and is raised as such.
    """
    seq = list(vertex_sequence)
    p = family.params
    lp = len(seq) - 1
    if lp < 1:
        raise InvalidParameterError("vertex sequence needs at least two elements")
    if lp > p.l:
        raise InvalidParameterError(f"sequence length {lp} exceeds the family budget l={p.l}")
    if len(set(seq)) != len(seq):
        raise InvalidParameterError("vertex sequence elements must be distinct")
    d = p.d
    if lp <= 2 * d:
        return HittingWitness(0, (0, lp))
    k = lp // d
    blocks = [set(seq[i * d : i * d + d]) for i in range(1, k)]
    for set_index, s in enumerate(family.sets):
        sset = set(s)
        if all(block & sset for block in blocks):
            indices = [0]
            for j, block in enumerate(blocks, start=1):
                base = j * d
                pick = next(t for t in range(base, base + d) if seq[t] in sset)
                indices.append(pick)
            indices.append(lp)
            return HittingWitness(set_index, tuple(indices))
    # No set hits every block, so some block is avoided by >= m*d/l sets.
    worst_block, worst_sets = None, ()
    for j, block in enumerate(blocks, start=1):
        avoiding = tuple(i for i, s in enumerate(family.sets) if not (block & set(s)))
        if len(avoiding) > len(worst_sets):
            worst_block, worst_sets = sorted(block), avoiding
    raise FamilyViolationError(
        f"no set meets every block; block {worst_block} is avoided by {len(worst_sets)} of {p.m} sets",
        block=worst_block,
        set_indices=worst_sets,
    )


# -- affine planes ------------------------------------------------------------


def minimal_prime_q(n: int) -> int:
    """Smallest prime q with q*q >= n."""
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    q = max(2, 1 + isqrt(n - 1))  # ceil(sqrt(n)), floored at the first prime
    while not is_prime(q):
        q += 1
    return q


def minimal_deficiency(q: int) -> int:
    """Smallest natural d with d*d + 2*q*d - q**3 > 0 (strict)."""
    if q < 2:
        raise InvalidParameterError("q must be >= 2")
    d = max(1, isqrt(q**3 + q * q) - q)
    while d * d + 2 * q * d <= q**3:
        d += 1
    while d > 1 and (d - 1) * (d - 1) + 2 * q * (d - 1) > q**3:
        d -= 1
    return d


@dataclass(frozen=True)
class AffinePlaneFamily:
    """All q(q+1) lines of the affine plane over GF(q), on labelled points.

    Point (x, y) gets label x*q + y + 1, so labels 1..q*q enumerate the
    plane row-major by x.
    """

    q: int
    lines: tuple[tuple[int, ...], ...]
    point_subset: tuple[int, ...]
    d: int


def affine_lines(q: int) -> AffinePlaneFamily:
    """Enumerate the plane over GF(q), q prime, one line per (a, b, c) class.

    Non-vertical lines are normalized to b = 1 (ordered by a then c),
    followed by the q vertical lines x = -c (ordered by c).
    """
    if not is_prime(q):
        raise InvalidParameterError(f"q = {q} is not prime")
    label = lambda x, y: x * q + y + 1
    lines = []
    for a in range(q):
        for c in range(q):
            lines.append(tuple(sorted(label(x, (-(a * x + c)) % q) for x in range(q))))
    for c in range(q):
        x = (-c) % q
        lines.append(tuple(sorted(label(x, y) for y in range(q))))
    _check_incidence(q, lines)
    return AffinePlaneFamily(q, tuple(lines), tuple(range(1, q * q + 1)), minimal_deficiency(q))


def _check_incidence(q: int, lines) -> None:
    # Each unordered point pair must lie on exactly one line.
    seen = {}
    for idx, line in enumerate(lines):
        if len(line) != q:
            raise InvalidParameterError(f"line {idx} has {len(line)} points, expected {q}")
        for pair in combinations(line, 2):
            if pair in seen:
                raise InvalidParameterError(f"pair {pair} on two lines ({seen[pair]}, {idx})")
            seen[pair] = idx
    if len(seen) != comb(q * q, 2):
        raise InvalidParameterError("some point pair lies on no line")


def line_cover_bound(q: int, u: int) -> Fraction:
    """Max number of distinct lines whose union misses u of the q*q points."""
    if not 0 <= u <= q * q:
        raise InvalidParameterError(f"u = {u} out of range 0..{q * q}")
    return Fraction((q + 1) * (q * q - u), u + q)


def verify_line_cover_bound(q: int, max_lines: int = 20):
    """Check the line-cover bound over every subset of lines, exhaustively.

    Only feasible for tiny planes (2**(q(q+1)) subsets).  Returns None on
    pass, else (subset_size, u, bound, line_indices).
    """
    plane = affine_lines(q)
    m = len(plane.lines)
    if m > max_lines:
        raise BudgetExceededError(f"2**{m} subsets is over the exhaustive budget")
    masks = []
    for line in plane.lines:
        pm = 0
        for p in line:
            pm |= 1 << (p - 1)
        masks.append(pm)
    unions = [0] * (1 << m)
    for bits in range(1, 1 << m):
        low = bits & -bits
        unions[bits] = unions[bits ^ low] | masks[low.bit_length() - 1]
    total = q * q
    for bits in range(1 << m):
        size = bits.bit_count()
        u = total - unions[bits].bit_count()
        if size > line_cover_bound(q, u):
            lines = tuple(i for i in range(m) if (bits >> i) & 1)
            return (size, u, line_cover_bound(q, u), lines)
    return None


def plane_family(n: int) -> CoveringFamily:
    """Covering family for {1..n} from the lines of the smallest fitting plane.

    Uses the first n points in row-major label order and intersects every
    line with them; declared parameters are (n, q(q+1), q, n, d).
    """
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    q = minimal_prime_q(n)
    plane = affine_lines(q)
    params = FamilyParams(n, q * (q + 1), q, n, plane.d)
    sets = [tuple(p for p in line if p <= n) for line in plane.lines]
    return CoveringFamily(params, sets)


# -- family text format --------------------------------------------------------
#
# Line 1: "FAMILY <n> <m> <s> <l> <d>"; then m lines, each one set as sorted
# space-separated elements (an empty set is an empty line).


def family_to_text(family: CoveringFamily) -> str:
    p = family.params
    lines = [f"FAMILY {p.n} {p.m} {p.s} {p.l} {p.d}"]
    for s in family.sets:
        lines.append(" ".join(str(v) for v in s))
    return "\n".join(lines) + "\n"


def family_from_text(text: str) -> CoveringFamily:
    lines = text.splitlines()
    if not lines:
        raise InvalidParameterError("empty family file")
    head = lines[0].split()
    if len(head) != 6 or head[0] != "FAMILY":
        raise InvalidParameterError(f"bad family header: {lines[0]!r}")
    params = FamilyParams(*(int(t) for t in head[1:]))
    body = lines[1:]
    if len(body) != params.m:
        raise InvalidParameterError(f"expected {params.m} set lines, got {len(body)}")
    sets = [tuple(int(t) for t in line.split()) for line in body]
    return CoveringFamily(params, sets)


def write_family(family: CoveringFamily, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(family_to_text(family))


def read_family(path) -> CoveringFamily:
    with open(path, "r") as fh:
        return family_from_text(fh.read())
