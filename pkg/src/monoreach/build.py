"""Circuit builders for directed reachability, with exact depth ledgers.

Three families of constructions:

* repeated squaring of the edge matrix (walk powers),
* composition through a covering set family: a shallow closure block, one
  clone of an inner circuit per set, and a final OR,
* the explicit affine-plane build and the recursive sampled-family build,
  both instances of the composition.

The squaring step uses the recurrence  next[i][j] = OR_k leaf_k  where
leaf_k is  cur[i][k] AND cur[k][j]  for k != j and leaf_j is cur[i][j]
itself (the k = j term is absorbed by it).  This computes walks of length
1..2**t without a constant-one wire, keeps the all-zero input at zero, and
adds exactly 1 + ceil(log2 n) depth per squaring for n >= 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .circuit import (
    AND,
    EMIT_BAND,
    MonotoneCircuit,
    bool_matrix_product,
    input_matrix,
    new_circuit,
    or_tree,
)
from .errors import (
    BudgetExceededError,
    ConstructionFailedError,
    InvalidParameterError,
)
from .exactmath import (
    PREC,
    child_seed,
    comb,
    floor_pow2,
    isqrt,
    ln_scaled,
    log2_fraction,
    log2_scaled,
)
from .families import (
    CoveringFamily,
    FamilyParams,
    augment_with_terminals,
    check_family_exact,
    check_family_sampled,
    minimal_deficiency,
    minimal_prime_q,
    plane_family,
    sample_family,
)


def ceil_log2(x: int) -> int:
    if x < 1:
        raise InvalidParameterError("ceil_log2 needs x >= 1")
    return (x - 1).bit_length()


# -- depth ledger ---------------------------------------------------------------


@dataclass
class Stage:
    label: str
    predicted: "int | Fraction"
    measured: int | None = None


@dataclass
class DepthLedger:
    """Per-stage depth terms: predictions are per-stage upper bounds and the
    measured column is the stage's contribution to the longest path."""

    stages: list[Stage] = field(default_factory=list)
    overhead: int | None = None

    @property
    def total_predicted(self):
        return sum(s.predicted for s in self.stages)

    @property
    def total_measured(self) -> int | None:
        total = 0
        for s in self.stages:
            if s.measured is None:
                return None
            total += s.measured
        return total


def ledger_csv_lines(ledger: DepthLedger, comments=()):
    for c in comments:
        yield f"# {c}"
    yield "stage,label,predicted,measured"
    for idx, s in enumerate(ledger.stages):
        pred = s.predicted if isinstance(s.predicted, int) else f"{float(s.predicted):.6f}"
        meas = "" if s.measured is None else str(s.measured)
        yield f"{idx},{s.label},{pred},{meas}"


# -- squaring builders ------------------------------------------------------------


def _square_reach_step(circuit: MonotoneCircuit, cur: np.ndarray) -> np.ndarray:
    """One squaring of the walk matrix: lengths 1..L become 1..2L."""
    n = cur.shape[0]
    if n == 1:
        return cur
    n2 = n * n
    k_index = np.array([[k for k in range(n) if k != j] for j in range(n)], dtype=np.int64)
    # Per entry e = (i, j): leaf k is cur[i,k] AND cur[k,j] for k != j and
    # cur[i,j] itself at position j (it absorbs the k = j product).
    lefts_full = np.ascontiguousarray(cur[:, k_index]).reshape(n2, n - 1)
    r2 = cur[k_index, np.arange(n, dtype=np.int64)[:, None]]  # [j, t] = cur[k, j]
    rights_full = np.tile(r2, (n, 1))
    pass_full = cur.reshape(n2)
    entry_j = np.tile(np.arange(n, dtype=np.int64), n)
    out = np.empty(n2, dtype=np.int64)
    for lo in range(0, n2, EMIT_BAND):
        hi = min(lo + EMIT_BAND, n2)
        and_ids = circuit._emit_bulk(AND, lefts_full[lo:hi].ravel(), rights_full[lo:hi].ravel())
        leaves = np.empty((hi - lo, n), dtype=np.int64)
        np.put_along_axis(leaves, k_index[entry_j[lo:hi]], and_ids.reshape(hi - lo, n - 1), axis=1)
        np.put_along_axis(leaves, entry_j[lo:hi, None], pass_full[lo:hi, None], axis=1)
        out[lo:hi] = circuit.or_reduce_columns(leaves)
    return out.reshape(n, n)


def _walk_power_entries(circuit: MonotoneCircuit, steps: int) -> np.ndarray:
    cur = input_matrix(circuit).entries
    for _ in range(steps):
        cur = _square_reach_step(circuit, cur)
    return cur


def build_walk_power(n: int, t: int) -> MonotoneCircuit:
    """Multi-output circuit: entry (i, j) is 1 iff a walk i -> j with between
    1 and 2**t edges exists.  Depth is exactly t * (1 + ceil(log2 n)) for
    n >= 2 (and 0 otherwise); diagonal entries report cycles, not the empty
    walk, so the all-zero input stays zero."""
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    if t < 0:
        raise InvalidParameterError("t must be >= 0")
    circuit = new_circuit(n)
    cur = _walk_power_entries(circuit, t)
    circuit.set_outputs(int(w) for w in cur.ravel())
    return circuit


def build_reach_leq(n: int, l: int) -> MonotoneCircuit:
    """Bounded-length reachability promise circuit: outputs 1 whenever some
    1 -> n path of at most l edges exists, 0 whenever no path exists."""
    if n < 2:
        raise InvalidParameterError("n must be >= 2")
    if l < 1:
        raise InvalidParameterError("l must be >= 1")
    circuit = new_circuit(n)
    cur = _walk_power_entries(circuit, ceil_log2(l))
    circuit.set_outputs([int(cur[0, n - 1])])
    return circuit


def build_reach_exact(n: int, l: int) -> MonotoneCircuit:
    """Exact-length circuit: 1 iff a walk 1 -> n of exactly l edges exists.

    Squares the edge matrix for each binary digit of l and multiplies the
    set-bit factors with a balanced product tree."""
    if n < 2:
        raise InvalidParameterError("n must be >= 2")
    if l < 1:
        raise InvalidParameterError("l must be >= 1")
    circuit = new_circuit(n)
    power = input_matrix(circuit)
    factors = []
    top = l.bit_length() - 1
    for i in range(top + 1):
        if (l >> i) & 1:
            factors.append(power)
        if i < top:
            power = bool_matrix_product(circuit, power, power)
    while len(factors) > 1:
        nxt = [
            bool_matrix_product(circuit, factors[t], factors[t + 1])
            for t in range(0, len(factors) - 1, 2)
        ]
        if len(factors) % 2:
            nxt.append(factors[-1])
        factors = nxt
    circuit.set_outputs([factors[0].entry(1, n)])
    return circuit


def build_reach(n: int) -> MonotoneCircuit:
    """Total reachability circuit (shortest paths have at most n-1 edges)."""
    if n < 2:
        raise InvalidParameterError("n must be >= 2")
    return build_reach_leq(n, n - 1)


# -- family composition ------------------------------------------------------------


def _splice(circuit: MonotoneCircuit, inner: MonotoneCircuit, input_map: np.ndarray) -> int:
    """Append a clone of `inner`, rewiring its inputs through input_map
    (index: inner wire id over inputs+zero).  Returns the clone's output wire."""
    n0_in = inner.num_inputs + 1
    base = circuit.num_wires
    ng = inner.gate_count
    if ng:
        in_l = np.frombuffer(inner._lefts, dtype=np.intc).astype(np.int64)
        in_r = np.frombuffer(inner._rights, dtype=np.intc).astype(np.int64)
        tl = np.where(in_l < n0_in, input_map[np.minimum(in_l, n0_in - 1)], in_l - n0_in + base)
        tr = np.where(in_r < n0_in, input_map[np.minimum(in_r, n0_in - 1)], in_r - n0_in + base)
        circuit._ops.extend(inner._ops)
        circuit._lefts.frombytes(np.ascontiguousarray(tl, dtype=np.intc).tobytes())
        circuit._rights.frombytes(np.ascontiguousarray(tr, dtype=np.intc).tobytes())
    out = inner.outputs[0]
    if out < n0_in:
        return int(input_map[out])
    return out - n0_in + base


def compose_family(family: CoveringFamily, inner: MonotoneCircuit):
    """Compose an inner bounded-length circuit through a covering family.

    Steps: add the terminals 1 and n to every set; build the closure block
    (walk powers up to 2**ceil(log2 2d) >= 2d edges); clone the inner
    circuit once per set on the closure outputs restricted to that set,
    padding unused input slots with the zero wire; OR the clone outputs.

    Returns (circuit, ledger); the ledger's measured stage contributions sum
    to the measured depth exactly.
    """
    p = family.params
    if len(inner.outputs) != 1:
        raise InvalidParameterError("inner circuit must have exactly one output")
    if inner.num_vertices != p.s + 2:
        raise InvalidParameterError(
            f"inner circuit has {inner.num_vertices} vertices, family needs s+2 = {p.s + 2}"
        )
    n = p.n
    if n < 2:
        raise InvalidParameterError("family universe must have n >= 2")
    augmented = augment_with_terminals(family)
    slots = augmented.params.s  # == p.s + 2 == inner.num_vertices
    circuit = new_circuit(n)
    t_c = ceil_log2(2 * p.d)
    closure = _walk_power_entries(circuit, t_c)
    closure_wires = [int(w) for w in closure.ravel()]

    clone_outs = []
    n0_in = inner.num_inputs + 1
    for s in augmented.sets:
        vertex_of_slot = [None] * (slots + 1)  # 1-based clone slots
        vertex_of_slot[1] = 1
        vertex_of_slot[slots] = n
        middle = [v for v in s if v not in (1, n)]
        for offset, v in enumerate(middle):
            vertex_of_slot[2 + offset] = v
        input_map = np.full(n0_in, circuit.zero, dtype=np.int64)
        for a in range(1, slots + 1):
            va = vertex_of_slot[a]
            if va is None:
                continue
            for b in range(1, slots + 1):
                vb = vertex_of_slot[b]
                if vb is None:
                    continue
                input_map[(a - 1) * slots + (b - 1)] = closure[va - 1, vb - 1]
        clone_outs.append(_splice(circuit, inner, input_map))

    out = or_tree(circuit, clone_outs)
    circuit.set_outputs([out])

    depths = circuit.wire_depths()
    closure_meas = int(max(depths[w] for w in closure_wires))
    blocks_meas = int(max(depths[w] for w in clone_outs)) - closure_meas
    or_meas = int(depths[out]) - closure_meas - blocks_meas
    l_n = ceil_log2(n)
    inner_depth = inner.depth()
    ledger = DepthLedger(
        stages=[
            Stage("closure", t_c * (1 + l_n), closure_meas),
            Stage("blocks", inner_depth, blocks_meas),
            Stage("or", ceil_log2(p.m), or_meas),
        ],
        overhead=int(depths[out]) - ceil_log2(p.m) - ceil_log2(p.d) * l_n - inner_depth,
    )
    return circuit, ledger


def build_explicit(n: int):
    """Reachability circuit from the affine-plane family over the smallest
    fitting prime; returns (circuit, ledger)."""
    if n < 2:
        raise InvalidParameterError("n must be >= 2")
    family = plane_family(n)
    q = family.params.s
    d = family.params.d
    inner = build_reach_leq(q + 2, n // d)
    return compose_family(family, inner)


# -- recursive schedule ------------------------------------------------------------


@dataclass(frozen=True)
class RecursionSchedule:
    """Level parameters for the recursive composed build.

    growth_factor is the per-level universe growth constant 2 ln n + 3
    (a dyadic rational here; kept distinct from the plane prime q used by
    the explicit build).  levels[i] = (n_i, l_i)."""

    n: int
    l: int
    d: int
    k: int
    growth_factor: Fraction
    levels: tuple[tuple[int, int], ...]

    @property
    def m(self) -> int:
        return self.n

    def family_params(self, i: int) -> FamilyParams:
        n_i, l_i = self.levels[i]
        n_next = self.levels[i + 1][0]
        return FamilyParams(n_i, n_i, n_next - 2, l_i, self.d)

    def predicted_depth(self) -> int:
        """Integer depth a build from this schedule achieves: per level an
        OR over n_i blocks plus the 2d-closure, then the base squaring."""
        total = 0
        for i in range(self.k):
            n_i = self.levels[i][0]
            total += ceil_log2(n_i) + ceil_log2(2 * self.d) * (1 + ceil_log2(n_i))
        n_k, l_k = self.levels[self.k]
        return total + ceil_log2(max(1, l_k)) * (1 + ceil_log2(n_k))


def recursion_schedule(n: int, l: int) -> RecursionSchedule:
    """Schedule: d = floor(2**sqrt(log2 n)), k = floor(log_d l),
    l_i = floor(l / d**i), n_i = floor(n * g**i / d**i) with g = 2 ln n + 3.

    Evaluated in scaled-integer arithmetic (96 fractional bits), so the
    schedule is identical on every platform.
    """
    if not 2 <= l < n:
        raise InvalidParameterError(f"need 2 <= l < n, got l={l}, n={n}")
    sqrt_log = isqrt(log2_scaled(n) << PREC)  # sqrt(log2 n) * 2**PREC
    d = floor_pow2(sqrt_log)
    if d < 2:
        d = 2
    k = 0
    while d ** (k + 1) <= l:
        k += 1
    growth_scaled = 2 * ln_scaled(n) + (3 << PREC)
    levels = []
    for i in range(k + 1):
        l_i = l // d**i
        n_i = (n * growth_scaled**i) // (d**i << (PREC * i))
        levels.append((int(n_i), l_i))
    assert levels[0] == (n, l)
    assert levels[k][1] <= d
    assert all(a[1] > b[1] for a, b in zip(levels, levels[1:]))  # l_i strictly falls
    return RecursionSchedule(n, l, d, k, Fraction(growth_scaled, 1 << PREC), tuple(levels))


def build_recursive(
    n: int,
    l: int,
    seed: int,
    attempt_budget: int = 10,
    allow_sampled: bool = False,
    sampled_trials: int = 100_000,
    exact_budget: int = 10_000_000,
):
    """Recursive composed build: squaring at the deepest level, then one
    sampled covering family and composition per level, outside in.

    Families are validated with the exact checker whenever its enumeration
    fits the budget; otherwise the build refuses unless allow_sampled is
    set, in which case Monte Carlo validation with sampled_trials is
    accepted.  Returns (circuit, ledger, schedule).
    """
    sched = recursion_schedule(n, l)
    n_k, l_k = sched.levels[sched.k]
    circuit = build_reach_leq(n_k, max(1, l_k))
    base_stage = Stage(
        f"level{sched.k}.squaring",
        ceil_log2(max(1, l_k)) * (1 + ceil_log2(n_k)),
        circuit.depth(),
    )
    level_stages: list[list[Stage]] = []
    for i in range(sched.k - 1, -1, -1):
        params = sched.family_params(i)
        family = _sample_verified_family(
            params, seed, i, attempt_budget, allow_sampled, sampled_trials, exact_budget
        )
        circuit, ledger = compose_family(family, circuit)
        closure, blocks, orstage = ledger.stages
        level_stages.append(
            [
                Stage(f"level{i}.closure", closure.predicted, closure.measured),
                Stage(f"level{i}.or", orstage.predicted, orstage.measured),
            ]
        )
    stages: list[Stage] = []
    for pair in reversed(level_stages):
        stages.extend(pair)
    stages.append(base_stage)
    return circuit, DepthLedger(stages=stages), sched


def _sample_verified_family(
    params: FamilyParams,
    seed: int,
    level: int,
    attempt_budget: int,
    allow_sampled: bool,
    sampled_trials: int,
    exact_budget: int,
) -> CoveringFamily:
    cost = comb(params.n, params.d)
    exact = cost <= exact_budget
    if not exact and not allow_sampled:
        raise BudgetExceededError(
            f"level {level} family check needs C({params.n},{params.d}) = {cost} subsets; "
            f"pass allow_sampled=True to accept Monte Carlo validation"
        )
    last = None
    for attempt in range(attempt_budget):
        fam_seed = child_seed(seed, f"level{level}:attempt{attempt}")
        family = sample_family(params, fam_seed)
        if exact:
            last = check_family_exact(family, max_subsets=exact_budget)
        else:
            last = check_family_sampled(family, sampled_trials, child_seed(fam_seed, "check"))
        if last is None:
            return family
    raise ConstructionFailedError(
        f"no covering family for {params} within {attempt_budget} attempts",
        last_counterexample=last,
    )


# -- gate-count and depth prediction ---------------------------------------------------

MODE_SQUARING = "squaring"
MODE_EXACT = "exact"
MODE_EXPLICIT = "explicit"
MODE_THEOREM = "theorem"


def _squaring_gates(n: int, steps: int) -> int:
    if n < 2:
        return 0
    return steps * n * n * (2 * n - 2)


def predict_gate_count(mode: str, n: int, l: int | None = None) -> int:
    """Exact gate count of a build without materializing it.

    Counts depend only on the mode parameters (clone sizes are fixed by the
    declared family shape, not by which sets get sampled).
    """
    if mode == MODE_SQUARING:
        if l is None:
            l = n - 1
        return _squaring_gates(n, ceil_log2(max(1, l)))
    if mode == MODE_EXACT:
        if l is None:
            raise InvalidParameterError("exact mode needs l")
        products = max(l.bit_length() - 1, 0) + l.bit_count() - 1
        return products * n * n * (2 * n - 1)
    if mode == MODE_EXPLICIT:
        q = minimal_prime_q(n)
        d = minimal_deficiency(q)
        m = q * (q + 1)
        inner = _squaring_gates(q + 2, ceil_log2(max(1, n // d)))
        return _squaring_gates(n, ceil_log2(2 * d)) + m * inner + (m - 1)
    if mode == MODE_THEOREM:
        if l is None:
            l = n - 1
        sched = recursion_schedule(n, l)
        n_k, l_k = sched.levels[sched.k]
        gates = _squaring_gates(n_k, ceil_log2(max(1, l_k)))
        for i in range(sched.k - 1, -1, -1):
            n_i = sched.levels[i][0]
            gates = _squaring_gates(n_i, ceil_log2(2 * sched.d)) + n_i * gates + (n_i - 1)
        return gates
    raise InvalidParameterError(f"unknown mode {mode!r}")


def predict_depth(mode: str, n: int, l: int | None = None) -> DepthLedger:
    """Stage-by-stage depth predictions without materializing gates.

    squaring and explicit use the integer formulas the builders achieve.
    theorem uses the idealized recursion main terms (level products of
    dyadic log2 values, 96 fractional bits): the per-level order-log
    overheads vanish against (log2 n)**2 and are excluded, so the numbers
    trace the construction's limiting trajectory.
    """
    if mode == MODE_SQUARING:
        if l is None:
            l = n
        if n < 2 or l < 1:
            raise InvalidParameterError("squaring mode needs n >= 2 and l >= 1")
        return DepthLedger(stages=[Stage("squaring", ceil_log2(l) * (1 + ceil_log2(n)))])
    if mode == MODE_EXPLICIT:
        if n < 2:
            raise InvalidParameterError("explicit mode needs n >= 2")
        q = minimal_prime_q(n)
        d = minimal_deficiency(q)
        m = q * (q + 1)
        l_in = max(1, n // d)
        return DepthLedger(
            stages=[
                Stage("closure", ceil_log2(2 * d) * (1 + ceil_log2(n))),
                Stage("blocks", ceil_log2(l_in) * (1 + ceil_log2(q + 2))),
                Stage("or", ceil_log2(m)),
            ]
        )
    if mode == MODE_THEOREM:
        if l is None:
            l = n - 1
        sched = recursion_schedule(n, l)
        log_d = log2_fraction(sched.d)
        stages = []
        for i in range(sched.k):
            n_i = sched.levels[i][0]
            stages.append(Stage(f"level{i}", log_d * log2_fraction(n_i)))
        n_k, l_k = sched.levels[sched.k]
        base = log2_fraction(max(1, l_k)) * log2_fraction(n_k)
        stages.append(Stage(f"level{sched.k}.squaring", base))
        return DepthLedger(stages=stages)
    raise InvalidParameterError(f"unknown prediction mode {mode!r}")


def depth_ratio(total, n: int) -> Fraction:
    """total / (log2 n)**2 as an exact rational (exact exponent for powers
    of two, dyadic log otherwise)."""
    if n & (n - 1) == 0:
        e = n.bit_length() - 1
        denom = Fraction(e * e)
    else:
        denom = log2_fraction(n) ** 2
    value = total if isinstance(total, Fraction) else Fraction(total)
    return value / denom


TREND_EXPONENTS = (10, 20, 40, 80, 160, 320, 640, 1024)


def trend_table(exponents=TREND_EXPONENTS):
    """Ratio-to-(log2 n)**2 rows for n = 2**e: (e, squaring, explicit, theorem).

    The squaring column uses l = n and the theorem column l = n - 1 (both
    realize plain reachability at that size).  All entries are exact
    Fractions.
    """
    rows = []
    for e in exponents:
        n = 1 << e
        sq = depth_ratio(predict_depth(MODE_SQUARING, n, n).total_predicted, n)
        ex = depth_ratio(predict_depth(MODE_EXPLICIT, n).total_predicted, n)
        th = depth_ratio(predict_depth(MODE_THEOREM, n, n - 1).total_predicted, n)
        rows.append((e, sq, ex, th))
    return rows
