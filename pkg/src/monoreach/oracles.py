"""Ground-truth graph oracles, generators, and batch comparison drivers.

Oracles are plain BFS / dynamic programming over adjacency bitmasks and are
kept independent of the circuit constructions they check.  The batch
helpers pack one bit per graph into Python integers so a circuit can be
evaluated on tens of thousands of graphs in one pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random

import numpy as np

from .circuit import AdjacencyMatrix, MonotoneCircuit
from .errors import BudgetExceededError, InvalidParameterError
from .exactmath import bernoulli_mask, child_seed, randbelow, sample_distinct

CHUNK_BITS = 16384  # graphs per bit-parallel evaluation chunk


# -- oracles -------------------------------------------------------------------


def _check_vertex(matrix: AdjacencyMatrix, v: int) -> None:
    if not 1 <= v <= matrix.n:
        raise InvalidParameterError(f"vertex {v} out of range 1..{matrix.n}")


def bfs_reachable(matrix: AdjacencyMatrix, src: int, dst: int) -> bool:
    _check_vertex(matrix, src)
    _check_vertex(matrix, dst)
    return _rows_reachable(matrix.rows, src, dst)


def _rows_reachable(rows, src: int, dst: int) -> bool:
    target = 1 << (dst - 1)
    visited = 1 << (src - 1)
    if visited & target:
        return True
    frontier = visited
    while frontier:
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            nxt |= rows[low.bit_length() - 1]
            f ^= low
        frontier = nxt & ~visited
        if frontier & target:
            return True
        visited |= frontier
    return False


def shortest_path_length(matrix: AdjacencyMatrix, src: int, dst: int) -> int | None:
    """BFS distance in edges, or None when dst is unreachable from src."""
    _check_vertex(matrix, src)
    _check_vertex(matrix, dst)
    return _rows_distance(matrix.rows, src, dst)


def _rows_distance(rows, src: int, dst: int) -> int | None:
    target = 1 << (dst - 1)
    visited = 1 << (src - 1)
    if visited & target:
        return 0
    frontier = visited
    dist = 0
    while frontier:
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            nxt |= rows[low.bit_length() - 1]
            f ^= low
        dist += 1
        frontier = nxt & ~visited
        if frontier & target:
            return dist
        visited |= frontier
    return None


def exact_length_walk_exists(matrix: AdjacencyMatrix, src: int, dst: int, l: int) -> bool:
    """Whether some walk of exactly l edges runs src -> dst (vertices may repeat)."""
    _check_vertex(matrix, src)
    _check_vertex(matrix, dst)
    if l < 0:
        raise InvalidParameterError("l must be >= 0")
    frontier = 1 << (src - 1)
    for _ in range(l):
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            nxt |= matrix.rows[low.bit_length() - 1]
            f ^= low
        frontier = nxt
        if not frontier:
            return False
    return bool(frontier & (1 << (dst - 1)))


# -- generators ----------------------------------------------------------------


@dataclass
class GraphSample:
    matrix: AdjacencyMatrix
    seed: int
    kind: str


def enumerate_graphs(n: int):
    """All 2**(n*n) adjacency matrices in index order (bit e of the index is
    input entry e).  Guarded to n <= 4."""
    if n > 4:
        raise BudgetExceededError(f"2**{n * n} graphs is over the exhaustive budget (n <= 4)")
    full = (1 << n) - 1
    for t in range(1 << (n * n)):
        yield AdjacencyMatrix(n, [(t >> (i * n)) & full for i in range(n)])


def graph_from_index(n: int, t: int) -> AdjacencyMatrix:
    full = (1 << n) - 1
    return AdjacencyMatrix(n, [(t >> (i * n)) & full for i in range(n)])


def random_graph(n: int, edge_prob: float, seed: int) -> GraphSample:
    """Independent edges with probability edge_prob (quantized to 2**-24)."""
    if not 0.0 <= edge_prob <= 1.0:
        raise InvalidParameterError("edge_prob must be in [0, 1]")
    rng = Random(seed)
    bits = bernoulli_mask(rng, n * n, edge_prob)
    full = (1 << n) - 1
    rows = [(bits >> (i * n)) & full for i in range(n)]
    return GraphSample(AdjacencyMatrix(n, rows), seed, f"uniform({edge_prob})")


def planted_path_graph(n: int, path_len: int, noise_prob: float, seed: int) -> GraphSample:
    """A 1 -> n path of exactly path_len edges, then independent noise edges.

    Intermediate vertices are distinct and drawn from 2..n-1, so the planted
    path is simple; noise can only shorten the 1 -> n distance.
    """
    if n < 2:
        raise InvalidParameterError("n must be >= 2")
    if not 1 <= path_len <= n - 1:
        raise InvalidParameterError(f"path_len {path_len} out of range 1..{n - 1}")
    if not 0.0 <= noise_prob <= 1.0:
        raise InvalidParameterError("noise_prob must be in [0, 1]")
    rng = Random(seed)
    hops = sample_distinct(rng, path_len - 1, n - 2)  # sorted labels in 1..n-2
    order = list(hops)
    # A random interleaving of the chosen intermediates (Fisher-Yates).
    for i in range(len(order) - 1, 0, -1):
        j = randbelow(rng, i + 1)
        order[i], order[j] = order[j], order[i]
    path = [1] + [v + 1 for v in order] + [n]
    m = AdjacencyMatrix(n)
    for a, b in zip(path, path[1:]):
        m.set_edge(a, b)
    noise = bernoulli_mask(rng, n * n, noise_prob)
    full = (1 << n) - 1
    for i in range(n):
        m.rows[i] |= (noise >> (i * n)) & full
    return GraphSample(m, seed, f"planted-path({path_len})")


def no_path_graph(n: int, edge_prob: float, seed: int) -> GraphSample:
    """Random graph with no 1 -> n path: vertices are split into a source
    side and a sink side and source->sink edges are withheld."""
    if n < 2:
        raise InvalidParameterError("n must be >= 2")
    rng = Random(seed)
    side = bernoulli_mask(rng, n, 0.5) | (1 << (n - 1))  # bit v-1 set: sink side
    side &= ~1  # vertex 1 stays on the source side
    bits = bernoulli_mask(rng, n * n, edge_prob)
    full = (1 << n) - 1
    rows = []
    for i in range(n):
        row = (bits >> (i * n)) & full
        if not (side >> i) & 1:
            row &= ~side  # source-side vertices may not reach the sink side
        rows.append(row)
    return GraphSample(AdjacencyMatrix(n, rows), seed, "no-path")


# -- graph text format ----------------------------------------------------------
#
# Line 1: "GRAPH <n>"; then n lines of n characters in {0,1}; row i lists the
# out-edges of vertex i.


def graph_to_text(matrix: AdjacencyMatrix) -> str:
    lines = [f"GRAPH {matrix.n}"]
    for i in range(1, matrix.n + 1):
        lines.append("".join(str(matrix.entry(i, j)) for j in range(1, matrix.n + 1)))
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> AdjacencyMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InvalidParameterError("empty graph file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "GRAPH":
        raise InvalidParameterError(f"bad graph header: {lines[0]!r}")
    n = int(head[1])
    if len(lines) != n + 1:
        raise InvalidParameterError(f"expected {n} rows, got {len(lines) - 1}")
    m = AdjacencyMatrix(n)
    for i, row in enumerate(lines[1:]):
        if len(row) != n or set(row) - {"0", "1"}:
            raise InvalidParameterError(f"bad graph row {i + 1}: {row!r}")
        m.rows[i] = int(row[::-1], 2)
    return m


def write_graph(matrix: AdjacencyMatrix, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(graph_to_text(matrix))


def read_graph(path) -> AdjacencyMatrix:
    with open(path, "r") as fh:
        return graph_from_text(fh.read())


# -- bit-parallel packing --------------------------------------------------------


def exhaustive_input_masks(n: int) -> tuple[list[int], int]:
    """Input masks covering all 2**(n*n) graphs at once (bit t = graph t)."""
    if n > 4:
        raise BudgetExceededError(f"2**{n * n} graphs is over the exhaustive budget (n <= 4)")
    e_count = n * n
    width = 1 << e_count
    ones = (1 << width) - 1
    masks = []
    for e in range(e_count):
        block = 1 << e
        rep = ones // ((1 << (2 * block)) - 1)  # one bit every 2*block positions
        masks.append(rep * (((1 << block) - 1) << block))
    return masks, width


def graph_ints_to_masks(graph_ints, n: int) -> list[int]:
    """Transpose per-graph packed matrices into per-entry masks (numpy packbits)."""
    e_count = n * n
    count = len(graph_ints)
    if count == 0:
        return [0] * e_count
    gbytes = (e_count + 7) // 8
    buf = bytearray(count * gbytes)
    for t, g in enumerate(graph_ints):
        buf[t * gbytes : (t + 1) * gbytes] = g.to_bytes(gbytes, "little")
    arr = np.frombuffer(bytes(buf), dtype=np.uint8).reshape(count, gbytes)
    bits = np.unpackbits(arr, axis=1, bitorder="little")[:, :e_count]
    packed = np.packbits(bits.T, axis=1, bitorder="little")
    return [int.from_bytes(packed[e].tobytes(), "little") for e in range(e_count)]


def masks_to_graph_ints(masks, width: int, n: int) -> list[int]:
    """Inverse of graph_ints_to_masks for a chunk of `width` graphs."""
    e_count = n * n
    if width == 0:
        return []
    mbytes = (width + 7) // 8
    buf = bytearray(e_count * mbytes)
    for e, mask in enumerate(masks):
        buf[e * mbytes : (e + 1) * mbytes] = mask.to_bytes(mbytes, "little")
    arr = np.frombuffer(bytes(buf), dtype=np.uint8).reshape(e_count, mbytes)
    bits = np.unpackbits(arr, axis=1, bitorder="little")[:, :width]
    packed = np.packbits(bits.T, axis=1, bitorder="little")
    return [int.from_bytes(packed[t].tobytes(), "little") for t in range(width)]


def matrices_to_masks(matrices) -> list[int]:
    gi = []
    for m in matrices:
        g = 0
        for i, row in enumerate(m.rows):
            g |= row << (i * m.n)
        gi.append(g)
    return graph_ints_to_masks(gi, matrices[0].n)


def bernoulli_entry_masks(rng: Random, n: int, width: int, p: float) -> list[int]:
    """Per-entry Bernoulli masks for a chunk of `width` random graphs.

    Entry order is the input wire order; the draw schedule (entry-major) is
    part of the documented sampling scheme.
    """
    return [bernoulli_mask(rng, width, p) for _ in range(n * n)]


def _graph_int_rows(g: int, n: int) -> list[int]:
    full = (1 << n) - 1
    return [(g >> (i * n)) & full for i in range(n)]


# -- comparison drivers -----------------------------------------------------------


@dataclass
class CheckReport:
    checked: int
    skipped: int
    mismatches: list  # (AdjacencyMatrix, expected, got)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _oracle_masks(graph_ints, n: int, l: int | None):
    """Packed reachability bits for 1 -> n, plus the promise mask for budget l."""
    reach = 0
    promise = 0
    for t, g in enumerate(graph_ints):
        rows = _graph_int_rows(g, n)
        dist = _rows_distance(rows, 1, n)
        if dist is not None:
            reach |= 1 << t
        if l is None or dist is None or dist <= l:
            promise |= 1 << t
    return reach, promise


def run_exhaustive_check(circuit: MonotoneCircuit, n: int, max_report: int = 4) -> CheckReport:
    """Compare the circuit against BFS on every graph over n vertices."""
    if circuit.num_vertices != n:
        raise InvalidParameterError("circuit size does not match n")
    masks, width = exhaustive_input_masks(n)
    out = circuit.evaluate_batch(masks)[0]
    full = (1 << n) - 1
    oracle = 0
    for t in range(width):
        rows = [(t >> (i * n)) & full for i in range(n)]
        if _rows_reachable(rows, 1, n):
            oracle |= 1 << t
    bad = out ^ oracle
    mism = []
    while bad and len(mism) < max_report:
        low = bad & -bad
        t = low.bit_length() - 1
        mism.append((graph_from_index(n, t), (oracle >> t) & 1, (out >> t) & 1))
        bad ^= low
    return CheckReport(width, 0, mism)


def _check_chunk(circuit, graph_ints, masks, l, max_report, mism):
    n = circuit.num_vertices
    out = circuit.evaluate_batch(masks)[0]
    reach, promise = _oracle_masks(graph_ints, n, l)
    bad = (out ^ reach) & promise
    width = len(graph_ints)
    skipped = width - promise.bit_count()
    while bad and len(mism) < max_report:
        low = bad & -bad
        t = low.bit_length() - 1
        mism.append((AdjacencyMatrix(n, _graph_int_rows(graph_ints[t], n)), (reach >> t) & 1, (out >> t) & 1))
        bad ^= low
    return skipped


def run_random_check(
    circuit: MonotoneCircuit,
    n: int,
    samples: int,
    seed: int,
    densities=(0.02, 0.1, 0.5),
    l: int | None = None,
    max_report: int = 4,
) -> CheckReport:
    """Compare against BFS on seeded random graphs at the given densities.

    With a length budget l, graphs whose shortest 1 -> n path exceeds l are
    outside the promise and are skipped, not counted as mismatches.
    """
    if circuit.num_vertices != n:
        raise InvalidParameterError("circuit size does not match n")
    mism: list = []
    checked = 0
    skipped = 0
    share = samples // len(densities)
    for pi, p in enumerate(densities):
        todo = samples - share * (len(densities) - 1) if pi == 0 else share
        rng = Random(child_seed(seed, f"random:n={n}:p={p}"))
        while todo > 0:
            width = min(todo, CHUNK_BITS)
            masks = bernoulli_entry_masks(rng, n, width, p)
            graph_ints = masks_to_graph_ints(masks, width, n)
            skipped += _check_chunk(circuit, graph_ints, masks, l, max_report, mism)
            checked += width
            todo -= width
    return CheckReport(checked, skipped, mism)


def run_planted_check(
    circuit: MonotoneCircuit,
    n: int,
    samples: int,
    seed: int,
    l: int | None = None,
    noise_prob: float = 0.05,
    max_report: int = 4,
) -> CheckReport:
    """Planted-path graphs (expected 1) alternating with no-path graphs
    (expected 0); path lengths stay within the budget l."""
    if circuit.num_vertices != n:
        raise InvalidParameterError("circuit size does not match n")
    limit = min(l, n - 1) if l is not None else n - 1
    mism: list = []
    checked = 0
    rng = Random(child_seed(seed, f"planted:n={n}:l={limit}"))
    done = 0
    while done < samples:
        width = min(samples - done, CHUNK_BITS)
        graph_ints = []
        expected = 0
        for t in range(width):
            idx = done + t
            sample_seed = child_seed(seed, f"planted:{idx}")
            if idx % 2 == 0:
                path_len = 1 + randbelow(rng, limit)
                g = planted_path_graph(n, path_len, noise_prob, sample_seed).matrix
                expected |= 1 << t
            else:
                g = no_path_graph(n, 0.3, sample_seed).matrix
            gi = 0
            for i, row in enumerate(g.rows):
                gi |= row << (i * n)
            graph_ints.append(gi)
        masks = graph_ints_to_masks(graph_ints, n)
        out = circuit.evaluate_batch(masks)[0]
        bad = out ^ expected
        while bad and len(mism) < max_report:
            low = bad & -bad
            t = low.bit_length() - 1
            mism.append(
                (AdjacencyMatrix(n, _graph_int_rows(graph_ints[t], n)), (expected >> t) & 1, (out >> t) & 1)
            )
            bad ^= low
        checked += width
        done += width
    return CheckReport(checked, 0, mism)
