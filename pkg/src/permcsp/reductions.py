"""The reduction chain and its combinatorial subroutines.

Implements, at desk scale, the constructive reductions

    sparse 3-SAT -> bounded-degree 3-Coloring -> degree-constrained
    n x n Clique -> 2n x 2n Biclique -> arity-4 Permutation CSP

plus the direct n x n Clique -> arity-6 Permutation CSP reduction, and
the two helpers they need: reflected ternary Gray codes and distance-3
vertex partitions.  Each reduction to a Permutation CSP emits a
:class:`ReductionCertificate` carrying the target value that
characterizes yes-instances.
"""

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np

from permcsp.core import (
    InvalidInputError,
    PermCspInstance,
    SizeLimitError,
)


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CnfFormula:
    """A CNF formula with clause sizes 1..3 and per-variable frequency bound.

    Literals are nonzero integers, DIMACS style.  ``freq_bound`` is the
    declared maximum number of literal occurrences of any variable; it
    defaults to the measured maximum.
    """

    num_vars: int
    clauses: Tuple[Tuple[int, ...], ...]
    freq_bound: int = 0

    def __post_init__(self):
        counts = self.frequencies()
        measured = max(counts.values(), default=0)
        if self.freq_bound == 0:
            object.__setattr__(self, "freq_bound", measured)
        elif measured > self.freq_bound:
            raise InvalidInputError(
                "a variable occurs %d times, declared bound is %d"
                % (measured, self.freq_bound)
            )
        for clause in self.clauses:
            for lit in clause:
                if lit == 0 or not 1 <= abs(lit) <= self.num_vars:
                    raise InvalidInputError("literal %d out of range" % lit)

    def frequencies(self) -> Dict[int, int]:
        """Number of literal occurrences of each variable."""
        counts = defaultdict(int)
        for clause in self.clauses:
            for l in clause:
                counts[abs(l)] += 1
        return dict(counts)


class GridGraph:
    """A graph on [side] x [side] backed by a dense boolean adjacency matrix.

    Vertex (i, j) (1-based row, column) has flat index
    (i-1)*side + (j-1), so a whole row occupies a contiguous slice of the
    matrix.  ``kind`` is "clique" for n x n Clique instances and
    "biclique" for 2n x 2n Biclique instances; condition checkers use it
    to pick the ranges the conditions quantify over.
    """

    def __init__(self, side, kind="clique", D=None, adj=None, delta_table=None,
                 meta=None):
        if side < 1:
            raise InvalidInputError("side must be positive")
        if kind not in ("clique", "biclique"):
            raise InvalidInputError("unknown grid kind %r" % (kind,))
        if kind == "biclique" and side % 2:
            raise InvalidInputError("biclique grids need an even side")
        self.side = side
        self.kind = kind
        self.D = D
        n = side * side
        if adj is None:
            adj = np.zeros((n, n), dtype=bool)
        if adj.shape != (n, n):
            raise InvalidInputError("adjacency must be %d x %d" % (n, n))
        self.adj = adj
        self.delta_table = delta_table
        self.meta = meta or {}

    @classmethod
    def from_edges(cls, side, edges, kind="clique", D=None, delta_table=None,
                   meta=None):
        g = cls(side, kind=kind, D=D, delta_table=delta_table, meta=meta)
        for a, b in edges:
            g.add_edge(a, b)
        return g

    def index(self, i, j):
        if not (1 <= i <= self.side and 1 <= j <= self.side):
            raise InvalidInputError("vertex (%d, %d) outside grid" % (i, j))
        return (i - 1) * self.side + (j - 1)

    def vertex(self, flat):
        return flat // self.side + 1, flat % self.side + 1

    def add_edge(self, a, b):
        u, v = self.index(*a), self.index(*b)
        if u == v:
            raise InvalidInputError("self-loop at %r" % (a,))
        self.adj[u, v] = self.adj[v, u] = True

    def has_edge(self, a, b):
        return bool(self.adj[self.index(*a), self.index(*b)])

    def num_edges(self):
        return int(self.adj.sum()) // 2

    def edges(self):
        """All edges as ((i,j),(i',j')) pairs, lexicographically sorted.

        A generator that scans one adjacency row at a time, so very large
        grids can be streamed without materializing the edge list.
        """
        for u in range(self.side * self.side):
            a = self.vertex(u)
            for v in np.nonzero(self.adj[u, u + 1:])[0]:
                yield a, self.vertex(u + 1 + int(v))

    def half_indices(self):
        """Flat indices of top-half and bottom-half vertices of a biclique
        grid, each enumerated lexicographically by (row, column)."""
        if self.kind != "biclique":
            raise InvalidInputError("half_indices only applies to biclique grids")
        n = self.side // 2
        top = np.array([(i - 1) * self.side + (j - 1)
                        for i in range(1, n + 1) for j in range(1, n + 1)])
        bottom = np.array([(n + i - 1) * self.side + (n + j - 1)
                           for i in range(1, n + 1) for j in range(1, n + 1)])
        return top, bottom

    def cross_matrix(self):
        """The n^2 x n^2 top-vs-bottom adjacency block of a biclique grid.

        Entry [(i-1)*n + j-1, (i'-1)*n + j'-1] says whether
        (i, j)(n+i', n+j') is an edge.
        """
        if self.kind != "biclique":
            raise InvalidInputError("cross_matrix only applies to biclique grids")
        n = self.side // 2
        adj4 = self.adj.reshape(self.side, self.side, self.side, self.side)
        return np.ascontiguousarray(adj4[:n, :n, n:, n:]).reshape(n * n, n * n)


@dataclass(frozen=True)
class GrayCode:
    """A reflected ternary Gray code on ``digits`` digit positions."""

    digits: int
    words: Tuple[Tuple[int, ...], ...]

    def array(self) -> np.ndarray:
        return np.array(self.words, dtype=np.int8)

    def rank(self, word) -> int:
        """Index of a word in the sequence."""
        return self.words.index(tuple(word))


@dataclass(frozen=True)
class ReductionCertificate:
    """Output of a reduction to Permutation CSP plus its yes-target.

    ``target`` is always computed by closed form, never by solving.
    ``dummy_vars``/``row_vars``/``col_vars`` name the output variables by
    role, in role-index order; together they partition 1..num_vars.
    """

    instance: PermCspInstance
    target: int
    kind: str               # "perm6" | "perm4"
    n: int                  # rows of the source grid (per half, for perm4)
    D: Optional[int]        # degree-constraint parameter (perm4 only)
    dummy_vars: Tuple[int, ...]
    row_vars: Tuple[int, ...]
    col_vars: Tuple[int, ...]
    source_edges: int = 0
    delta_sum: int = 0


# ---------------------------------------------------------------------------
# Combinatorial helpers
# ---------------------------------------------------------------------------

def ternary_gray(x: int, cap: int = 12) -> GrayCode:
    """Reflected ternary Gray code on x digits.

    All 3^x words are distinct and consecutive words differ in exactly one
    digit.  Digit 0 is the most significant (slowest) position: even
    positions run 0,1,2 ascending, odd positions descending.
    """
    if not 1 <= x <= cap:
        raise InvalidInputError("digit count %d outside [1, %d]" % (x, cap))
    words = [()]
    for _ in range(x):
        nxt = []
        for d in (0, 1, 2):
            block = words if d % 2 == 0 else list(reversed(words))
            nxt.extend((d,) + w for w in block)
        words = nxt
    return GrayCode(digits=x, words=tuple(words))


def distance3_partition(g: nx.Graph, degree_bound: int) -> List[List[int]]:
    """Partition V(g) into classes pairwise at distance >= 3.

    Greedily colors the square graph (adjacent iff distance <= 2), which
    has maximum degree <= degree_bound^2, so at most degree_bound^2 + 1
    classes are produced.
    """
    if any(d > degree_bound for _, d in g.degree()):
        raise InvalidInputError("graph has a vertex of degree above %d" % degree_bound)
    color = {}
    for v in sorted(g.nodes()):
        seen = set()
        for u in g[v]:
            if u in color:
                seen.add(color[u])
            for w in g[u]:
                if w in color and w != v:
                    seen.add(color[w])
        c = 0
        while c in seen:
            c += 1
        color[v] = c
    num_classes = max(color.values(), default=0) + 1 if color else 1
    classes = [[] for _ in range(num_classes)]
    for v in sorted(color):
        classes[color[v]].append(v)
    assert len(classes) <= degree_bound * degree_bound + 1
    return classes


# ---------------------------------------------------------------------------
# 3-SAT -> bounded-degree 3-Coloring
# ---------------------------------------------------------------------------

def reduce_sat_to_coloring(cnf: CnfFormula) -> Tuple[nx.Graph, int]:
    """Build a graph that is 3-colorable iff ``cnf`` is satisfiable.

    The classic coloring reduction, with the single T/F/N triangle
    expanded into a triangulated ladder so that every attachment goes to
    its own ladder vertex and the maximum degree stays bounded.

    Returns the graph (integer vertices 1..N) and the degree bound
    max(freq_bound + 2, 5).

    Layout: ladder vertices are 1..L with roles by index mod 3
    (1 -> N, 2 -> T, 0 -> F); the literal vertices for variable i are
    L + 2i - 1 (positive) and L + 2i (negative); each clause gets a
    6-vertex OR gadget, two cascaded binary-OR triangles whose output
    must share the T role.  Clauses shorter than 3 are padded with fresh
    forced-false vertices rather than repeated literals, so a literal
    vertex's degree never exceeds its occurrence count plus 2.
    """
    for clause in cnf.clauses:
        if not 1 <= len(clause) <= 3:
            raise InvalidInputError("clause size %d outside [1, 3]" % len(clause))
    nv, m = cnf.num_vars, len(cnf.clauses)
    ladder_len = 3 * (2 * nv + 4 * m + 1)
    g = nx.Graph()
    g.add_nodes_from(range(1, ladder_len + 2 * nv + 6 * m + 1))

    for t in range(1, ladder_len):
        g.add_edge(t, t + 1)
    for t in range(1, ladder_len - 1):
        g.add_edge(t, t + 2)

    # Dedicated attachment points, handed out in construction order.
    n_role = iter(range(1, ladder_len + 1, 3))
    t_role = iter(range(2, ladder_len + 1, 3))
    f_role = iter(range(3, ladder_len + 1, 3))

    def lit_vertex(lit):
        return ladder_len + 2 * abs(lit) - (1 if lit > 0 else 0)

    for i in range(1, nv + 1):
        pos, neg = lit_vertex(i), lit_vertex(-i)
        g.add_edge(pos, neg)
        g.add_edge(pos, next(n_role))
        g.add_edge(neg, next(n_role))

    next_pad = ladder_len + 2 * nv + 6 * m + 1

    def pad_vertex():
        # Fresh vertex adjacent to dedicated N and T ladder vertices, so
        # any proper coloring gives it the F role: a constant-false input.
        nonlocal next_pad
        w = next_pad
        next_pad += 1
        g.add_edge(w, next(n_role))
        g.add_edge(w, next(t_role))
        return w

    for j, clause in enumerate(cnf.clauses):
        inputs = [lit_vertex(l) for l in clause]
        while len(inputs) < 3:
            inputs.append(pad_vertex())
        base = ladder_len + 2 * nv + 6 * j
        p1, q1, o1, p2, q2, out = range(base + 1, base + 7)
        g.add_edges_from([(p1, q1), (p1, o1), (q1, o1),
                          (p2, q2), (p2, out), (q2, out), (o1, p2)])
        g.add_edge(inputs[0], p1)
        g.add_edge(inputs[1], q1)
        g.add_edge(inputs[2], q2)
        g.add_edge(out, next(n_role))
        g.add_edge(out, next(f_role))

    return g, max(cnf.freq_bound + 2, 5)


# ---------------------------------------------------------------------------
# 3-Coloring -> D-degree-constrained n x n Clique
# ---------------------------------------------------------------------------

def coloring_grid_digits(num_vertices: int, degree_bound: int) -> int:
    """Smallest x with (f'^2 + 1) + floor((n - f'^2 - 1)/x) <= 3^x."""
    f2 = degree_bound * degree_bound
    x = 1
    while f2 + 1 + (num_vertices - f2 - 1) // x > 3 ** x:
        x += 1
    return x


def reduce_coloring_to_dcnnc(g: nx.Graph, degree_bound: int,
                             row_cap: int = 81) -> GridGraph:
    """Encode a bounded-degree 3-Coloring instance as D-DCnnC with
    D = degree_bound.

    Vertices are grouped into blocks of x vertices, pairwise at distance
    >= 3 within a block; row i of the grid enumerates all 3^x colorings of
    block i in ternary-Gray order, and two grid vertices are adjacent iff
    their colorings conflict on no edge of ``g``.  Conditions (A)
    (row-pair regularity) and (B) (consecutive-column stability) are
    re-checked before returning.
    """
    from permcsp import validate

    nodes = sorted(g.nodes())
    n0 = len(nodes)
    if nodes != list(range(1, n0 + 1)):
        raise InvalidInputError("graph vertices must be 1..n")
    x = coloring_grid_digits(n0, degree_bound)
    nprime = 3 ** x
    if nprime > row_cap:
        raise SizeLimitError(
            "grid would have %d rows of %d columns, above cap %d"
            % (nprime, nprime, row_cap)
        )

    classes = distance3_partition(g, degree_bound)
    blocks: List[List[int]] = []
    for cls in classes:
        for lo in range(0, len(cls), x):
            blocks.append(cls[lo:lo + x])
    if len(blocks) > nprime:
        raise InvalidInputError(
            "partition produced %d blocks for %d rows" % (len(blocks), nprime)
        )
    while len(blocks) < nprime:
        blocks.append([])
    next_id = n0 + 1
    padding = []
    for block in blocks:
        while len(block) < x:
            block.append(next_id)
            padding.append(next_id)
            next_id += 1
    assert len(padding) == nprime * x - n0

    words = ternary_gray(x).array()        # (nprime, x), shared by every row

    where = {}
    for bi, block in enumerate(blocks):
        for k, v in enumerate(block):
            where[v] = (bi, k)
    pair_edges = defaultdict(list)
    for u, v in g.edges():
        (bu, ku), (bv, kv) = where[u], where[v]
        assert bu != bv, "blocks must be independent sets"
        if bu > bv:
            (bu, ku), (bv, kv) = (bv, kv), (bu, ku)
        pair_edges[(bu, bv)].append((ku, kv))
    for (bu, bv), matched in pair_edges.items():
        firsts = [a for a, _ in matched]
        seconds = [b for _, b in matched]
        assert len(set(firsts)) == len(firsts) and len(set(seconds)) == len(seconds), \
            "block pair does not induce a matching"

    total = nprime * nprime
    adj = np.ones((total, total), dtype=bool)
    for i in range(nprime):
        sl = slice(i * nprime, (i + 1) * nprime)
        adj[sl, sl] = False
    for (bu, bv), matched in pair_edges.items():
        compat = np.ones((nprime, nprime), dtype=bool)
        for ku, kv in matched:
            compat &= words[:, ku][:, None] != words[:, kv][None, :]
        adj[bu * nprime:(bu + 1) * nprime, bv * nprime:(bv + 1) * nprime] = compat
        adj[bv * nprime:(bv + 1) * nprime, bu * nprime:(bu + 1) * nprime] = compat.T

    delta = np.zeros((nprime, nprime), dtype=np.int64)
    for i in range(nprime):
        for k in range(nprime):
            if i == k:
                continue
            pair = (i, k) if i < k else (k, i)
            mm = len(pair_edges.get(pair, ()))
            delta[i, k] = (2 ** mm) * (3 ** (x - mm))

    grid = GridGraph(nprime, kind="clique", D=degree_bound, adj=adj,
                     delta_table=delta,
                     meta={"blocks": [tuple(b) for b in blocks],
                           "x": x,
                           "gray_digits": x,
                           "num_original": n0,
                           "padding": tuple(padding)})

    report, computed = validate.check_regularity(grid)
    if not report.holds or not np.array_equal(computed, delta):
        raise InvalidInputError("construction broke row-pair regularity")
    report, _ = validate.check_stability(grid, degree_bound)
    if not report.holds:
        raise InvalidInputError("construction broke consecutive-column stability")
    return grid


# ---------------------------------------------------------------------------
# D-DCnnC -> D-DCnnB
# ---------------------------------------------------------------------------

def reduce_dcnnc_to_dcnnb(g: GridGraph) -> GridGraph:
    """Double a clique grid into a biclique grid.

    (i,j)(n+i',n+j') is an edge of H iff (i,j)(i',j') is an edge of G or
    i = i' and j = j'.  The delta table is recomputed from H, never copied.
    """
    from permcsp import validate

    if g.kind != "clique":
        raise InvalidInputError("input must be an n x n clique grid")
    report, _ = validate.check_regularity(g)
    if not report.holds:
        raise InvalidInputError("input violates row-pair regularity: %s"
                                % (report.violations[:3],))
    if g.D is not None:
        report, _ = validate.check_stability(g, g.D)
        if not report.holds:
            raise InvalidInputError("input violates stability: %s"
                                    % (report.violations[:3],))

    n = g.side
    side = 2 * n
    total = side * side
    adj = np.zeros((total, total), dtype=bool)
    h = GridGraph(side, kind="biclique", D=g.D, adj=adj,
                  meta={"source_side": n})
    cross = (g.adj | np.eye(n * n, dtype=bool)).reshape(n, n, n, n)
    adj4 = adj.reshape(side, side, side, side)   # [i, j, i', j'] view
    adj4[:n, :n, n:, n:] = cross
    adj4[n:, n:, :n, :n] = cross.transpose(2, 3, 0, 1)

    report = validate.check_biclique_structure(h)
    if not report.holds:
        raise InvalidInputError("doubling broke the biclique structure")
    report, delta = validate.check_regularity(h)
    if not report.holds:
        raise InvalidInputError("doubling broke row-pair regularity")
    h.delta_table = delta
    if h.D is not None:
        # The diagonal pairing edges make row n+i differ between columns j
        # and j+1 for every top vertex (i, j), which can cost one extra
        # unstable row on top of what the source grid allowed.  Transfer D
        # unchanged when it still suffices, else bump it by one.
        report, _ = validate.check_stability(h, h.D)
        if not report.holds:
            h.D += 1
            report, _ = validate.check_stability(h, h.D)
            if not report.holds:
                raise InvalidInputError("doubling broke stability")
    return h


# ---------------------------------------------------------------------------
# n x n Clique -> arity-6 Permutation CSP
# ---------------------------------------------------------------------------

def _check_no_row_edges(g: GridGraph):
    side = g.side
    block = g.adj.reshape(side, side, side, side)
    for i in range(side):
        if block[i, :, i, :].any():
            raise InvalidInputError("grid has an edge inside row %d" % (i + 1))


def sufficient_dummies_perm6(n: int) -> int:
    """Dummy count making the arity-6 structure argument airtight at size n.

    The dominance inequalities behind the shape of optimal orderings are
    stated for sufficiently large n with 2n dummies; here they are solved
    explicitly so the if-and-only-if also holds at desk scale.  Never
    below the 2n default.
    """
    if n < 1:
        raise InvalidInputError("n must be positive")
    budget = comb(n * n, 2)      # most constraints G can ever contribute
    if budget == 0:
        return 2 * n
    d = 4
    while not (comb(d - 2, 2) * comb(n + 1, 2) > budget
               and comb(d - 1, 3) * n > budget
               and comb(d, 4) > budget):
        d += 1
    return max(2 * n, d)


def reduce_clique_to_perm6(g: GridGraph, dummy_count: Optional[int] = None
                           ) -> ReductionCertificate:
    """n x n Clique -> arity-6 Permutation CSP.

    With the paper-default ``dummy_count = 2n`` the output has 4n + 1
    variables: dummies d_1..d_m, rows r_1..r_n, columns c_1..c_{n+1}.
    The optimum meets the target iff the grid has a row-transversal
    n-clique (guaranteed only when the dummy count is sufficient; see
    :func:`sufficient_dummies_perm6`).
    """
    if g.kind != "clique":
        raise InvalidInputError("input must be an n x n clique grid")
    _check_no_row_edges(g)
    n = g.side
    if dummy_count is None:
        dummy_count = 2 * n
    if dummy_count < 2 * n:
        raise InvalidInputError("dummy_count must be at least 2n = %d" % (2 * n))
    m = dummy_count

    def r(i):
        return m + i

    def c(j):
        return m + n + j

    constraints = []
    for a, b, cc, d in itertools.combinations(range(1, m + 1), 4):
        for j, jp in itertools.combinations(range(1, n + 2), 2):
            constraints.append((a, b, cc, d, c(j), c(jp)))
    for i in range(1, n + 1):
        constraints.append((c(1), r(i), c(n + 1)))
    num_structural = len(constraints)

    for (i, j), (ip, jp) in _sorted_by_column(g.edges()):
        if j + 2 <= jp:
            constraints.append((c(j), r(i), c(j + 1), c(jp), r(ip), c(jp + 1)))
        elif jp == j + 1:
            constraints.append((c(j), r(i), c(j + 1), r(ip), c(j + 2)))
        else:
            constraints.append((c(j), r(i), r(ip), c(j + 1)))

    instance = PermCspInstance.make(m + 2 * n + 1, constraints)
    target = comb(m, 4) * comb(n + 1, 2) + n + comb(n, 2)
    assert num_structural == comb(m, 4) * comb(n + 1, 2) + n
    return ReductionCertificate(
        instance=instance, target=target, kind="perm6", n=n, D=None,
        dummy_vars=tuple(range(1, m + 1)),
        row_vars=tuple(r(i) for i in range(1, n + 1)),
        col_vars=tuple(c(j) for j in range(1, n + 2)),
        source_edges=g.num_edges(),
    )


def _sorted_by_column(edges):
    """Orient each edge by (column, row) and sort; the constraint shapes
    for the arity-6 reduction depend on the column gap of the oriented
    edge."""
    oriented = []
    for (i, j), (ip, jp) in edges:
        if (j, i) > (jp, ip):
            (i, j), (ip, jp) = (ip, jp), (i, j)
        oriented.append(((i, j), (ip, jp)))
    return sorted(oriented)


# ---------------------------------------------------------------------------
# D-DCnnB -> arity-4 Permutation CSP
# ---------------------------------------------------------------------------

def sufficient_dummies_perm4(n: int, D: int, num_edges: int) -> int:
    """Dummy count making the arity-4 structure argument airtight at size n.

    One column-pair fix must dominate the worst accumulated column-move
    cost (2Dn per switch, over a row block of length n), and the
    structural constraints must dominate everything the edge constraints
    can contribute.  Never below the 2Dn default.
    """
    if n < 1 or D < 1:
        raise InvalidInputError("n and D must be positive")
    d = 2
    while not (comb(d, 2) >= 2 * D * n * n + 1 and comb(d, 2) > 4 * num_edges):
        d += 1
    return max(2 * D * n, d)


def reduce_dcnnb_to_perm4(h: GridGraph, D: Optional[int] = None,
                          dummy_count: Optional[int] = None
                          ) -> ReductionCertificate:
    """2n x 2n Biclique -> arity-4 Permutation CSP.

    With the paper-default ``dummy_count = 2Dn`` the output has
    (2D + 4)n + 1 variables.  For every edge (i,j)(n+i',n+j') four
    constraints are emitted, one per shape family (crcr, crrc, rcrc,
    rccr); the degenerate rccr case j = n, j' = 1 is replaced by the
    dummy-anchored form.  The target is
    C(d,2)*C(2n+1,2) + (n+2)*sum(Delta) + n^2.
    """
    from permcsp import validate

    if h.kind != "biclique":
        raise InvalidInputError("input must be a 2n x 2n biclique grid")
    report = validate.check_biclique_structure(h)
    if not report.holds:
        raise InvalidInputError("input violates the biclique structure: %s"
                                % (report.violations[:3],))
    if D is None:
        D = h.D
    if D is None:
        raise InvalidInputError("degree-constraint parameter D is required")
    report, delta = validate.check_regularity(h)
    if not report.holds:
        raise InvalidInputError("input violates row-pair regularity: %s"
                                % (report.violations[:3],))
    report, _ = validate.check_stability(h, D)
    if not report.holds:
        raise InvalidInputError("input violates stability for D=%d: %s"
                                % (D, (report.violations[:3],)))

    n = h.side // 2
    if dummy_count is None:
        dummy_count = 2 * D * n
    if dummy_count < 2:
        raise InvalidInputError("need at least two dummies")
    m = dummy_count
    delta_sum = int(delta[:n, n:].sum())

    def r(i):
        return m + i

    def c(j):
        return m + 2 * n + j

    constraints = []
    for a, b in itertools.combinations(range(1, m + 1), 2):
        for j, jp in itertools.combinations(range(1, 2 * n + 2), 2):
            constraints.append((a, b, c(j), c(jp)))

    cross = h.cross_matrix()
    for a, b in zip(*np.nonzero(cross)):
        i, j = int(a) // n + 1, int(a) % n + 1
        ip, jp = int(b) // n + 1, int(b) % n + 1
        constraints.append((c(j), r(i), c(n + jp), r(n + ip)))
        constraints.append((c(j), r(i), r(n + ip), c(n + jp + 1)))
        constraints.append((r(i), c(j + 1), r(n + ip), c(n + jp + 1)))
        if j == n and jp == 1:
            constraints.append((1, r(i), c(n + 1), r(n + ip)))
        else:
            constraints.append((r(i), c(j + 1), c(n + jp), r(n + ip)))

    instance = PermCspInstance.make(m + 4 * n + 1, constraints)
    target = comb(m, 2) * comb(2 * n + 1, 2) + (n + 2) * delta_sum + n * n
    return ReductionCertificate(
        instance=instance, target=target, kind="perm4", n=n, D=D,
        dummy_vars=tuple(range(1, m + 1)),
        row_vars=tuple(r(i) for i in range(1, 2 * n + 1)),
        col_vars=tuple(c(j) for j in range(1, 2 * n + 2)),
        source_edges=h.num_edges(),
        delta_sum=delta_sum,
    )
