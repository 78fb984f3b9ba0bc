"""Exact solvers and decision oracles.

- :func:`solve_brute`: exhaustive search over all orderings, vectorized in
  batches so 11-element instances stay in minutes territory.
- :func:`solve_dp3`: the O*(2^n) subset DP covering the arity <= 3 side of
  the dichotomy.
- :func:`solve_convenient`: optimum over convenient orderings of an
  arity-4 reduction output, via the closed-form count.
- :func:`solve_sat`, :func:`solve_3coloring`, :func:`solve_row_clique`,
  :func:`solve_row_biclique`: the auxiliary oracles for the reduction
  chain.
"""

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np

from permcsp.core import (
    InternalConsistencyError,
    InvalidInputError,
    Ordering,
    PermCspInstance,
    SizeLimitError,
    UnsupportedArityError,
    evaluate,
)
from permcsp.reductions import CnfFormula, GridGraph, ReductionCertificate


@dataclass(frozen=True)
class SolveResult:
    optimum: int
    witness: Ordering
    nodes_explored: int


@dataclass(frozen=True)
class RowSelection:
    """One column choice per row (the function phi); 1-based columns."""

    choice: Tuple[int, ...]

    def vertices(self):
        return tuple((i, j) for i, j in enumerate(self.choice, start=1))


# ---------------------------------------------------------------------------
# Brute force
# ---------------------------------------------------------------------------

# Batch size for the vectorized path: permutations of the last 9 positions
# are enumerated as one numpy block.
_BATCH_SUFFIX = 9


def solve_brute(instance: PermCspInstance, limit: int = 11,
                threads: int = 1) -> SolveResult:
    """Exact optimum by exhaustive enumeration of all n! orderings.

    The witness is the lexicographically first maximizer, in terms of the
    sequence of variables listed in position order.  Enumeration order and
    the reduction over batches are fixed, so results are bit-identical for
    any thread count.
    """
    n = instance.num_vars
    if n > limit:
        raise SizeLimitError(
            "instance has %d variables, above the brute-force limit %d "
            "(raise the limit explicitly to override)" % (n, limit)
        )
    if n <= 6:
        return _brute_small(instance)
    return _brute_batched(instance, threads)


def _brute_small(instance):
    pos = [0] * (instance.num_vars + 1)
    cons = instance.constraints
    best, best_seq, nodes = -1, None, 0
    for seq in itertools.permutations(range(1, instance.num_vars + 1)):
        nodes += 1
        for p, v in enumerate(seq):
            pos[v] = p
        count = 0
        for c in cons:
            prev = -1
            for v in c:
                p = pos[v]
                if p <= prev:
                    break
                prev = p
            else:
                count += 1
        if count > best:
            best, best_seq = count, seq
    return SolveResult(best, Ordering.from_sequence(best_seq), nodes)


def _brute_batched(instance, threads):
    n = instance.num_vars
    cons_pairs = [tuple((c[k] - 1, c[k + 1] - 1) for k in range(len(c) - 1))
                  for c in instance.constraints]
    always = sum(1 for pairs in cons_pairs if not pairs)
    cons_pairs = [pairs for pairs in cons_pairs if pairs]
    pair_list = sorted({pr for pairs in cons_pairs for pr in pairs})

    plen = max(0, n - _BATCH_SUFFIX)
    rest = np.array(list(itertools.permutations(range(n - plen))), dtype=np.int8)
    batch = rest.shape[0]
    rows = np.arange(batch)[:, None]
    positions = np.arange(n, dtype=np.int8)[None, :]

    def eval_prefix(prefix):
        remaining = np.array([v for v in range(n) if v not in prefix],
                             dtype=np.int8)
        orders = np.empty((batch, n), dtype=np.int8)
        if plen:
            orders[:, :plen] = np.array(prefix, dtype=np.int8)
        orders[:, plen:] = remaining[rest]
        pos = np.empty((batch, n), dtype=np.int8)
        pos[rows, orders] = positions
        cache = {pr: pos[:, pr[0]] < pos[:, pr[1]] for pr in pair_list}
        counts = np.zeros(batch, dtype=np.int32)
        for pairs in cons_pairs:
            mask = cache[pairs[0]]
            for pr in pairs[1:]:
                mask = mask & cache[pr]
            counts += mask
        idx = int(np.argmax(counts))            # first maximizer in the batch
        return int(counts[idx]), tuple(int(v) + 1 for v in orders[idx])

    prefixes = list(itertools.permutations(range(n), plen))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(eval_prefix, prefixes))
    else:
        results = map(eval_prefix, prefixes)

    best, best_seq = -1, None
    for count, seq in results:                   # reduce in lexicographic order
        if count > best:
            best, best_seq = count, seq
    return SolveResult(best + always, Ordering.from_sequence(best_seq),
                       math.factorial(n))


# ---------------------------------------------------------------------------
# Subset DP for arity <= 3
# ---------------------------------------------------------------------------

def solve_dp3(instance: PermCspInstance, max_vars: int = 24) -> SolveResult:
    """Exact optimum in O*(2^n) time by dynamic programming over subsets.

    The state f(S) is the best count achievable over orderings whose
    placed prefix is exactly S.  The transition adds one variable v and
    credits the constraints decided at that moment:

    * an arity-1 constraint (v) is always satisfied;
    * an arity-2 constraint (a, v) is satisfied iff a is already placed;
    * an arity-3 constraint (a, v, c), keyed on its MIDDLE element v, is
      satisfied iff a is already placed and c is not.

    An arity-3 constraint is satisfied exactly when, at the moment its
    middle element is placed, the first element is in the prefix and the
    last is not -- so each constraint is credited exactly once, and the
    final value f(V) is the true optimum.
    """
    if instance.arity > 3:
        raise UnsupportedArityError(
            "subset DP applies to arity <= 3 only (the other side of the "
            "dichotomy has no known O*(c^n) algorithm); got arity %d"
            % instance.arity
        )
    n = instance.num_vars
    if n > max_vars:
        raise SizeLimitError("instance has %d variables, DP cap is %d"
                             % (n, max_vars))

    gain1 = [0] * n
    pairs2: List[List[int]] = [[] for _ in range(n)]
    trips: List[List[Tuple[int, int]]] = [[] for _ in range(n)]
    for c in instance.constraints:
        if len(c) == 1:
            gain1[c[0] - 1] += 1
        elif len(c) == 2:
            pairs2[c[1] - 1].append(c[0] - 1)
        else:
            trips[c[1] - 1].append((c[0] - 1, c[2] - 1))

    full = (1 << n) - 1
    f = [-1] * (full + 1)
    back = [0] * (full + 1)
    f[0] = 0
    for t in range(1, full + 1):
        best, bestv = -1, -1
        for v in range(n):
            bit = 1 << v
            if not t & bit:
                continue
            s = t ^ bit
            g = gain1[v]
            for a in pairs2[v]:
                if s >> a & 1:
                    g += 1
            for a, cc in trips[v]:
                if s >> a & 1 and not s >> cc & 1:
                    g += 1
            val = f[s] + g
            if val > best:                       # ties go to the smallest v
                best, bestv = val, v
        f[t] = best
        back[t] = bestv

    seq_rev = []
    t = full
    while t:
        v = back[t]
        seq_rev.append(v + 1)
        t ^= 1 << v
    witness = Ordering.from_sequence(tuple(reversed(seq_rev)))
    return SolveResult(f[full], witness, full + 1)


# ---------------------------------------------------------------------------
# DPLL
# ---------------------------------------------------------------------------

def solve_sat(cnf: CnfFormula) -> Optional[Dict[int, bool]]:
    """Complete DPLL with unit propagation.

    Branches on the lowest-index unassigned variable, true first.
    Returns a full satisfying assignment, or None.
    """
    clauses = [tuple(c) for c in cnf.clauses]
    if any(len(c) == 0 for c in clauses):
        return None

    def propagate(assign):
        changed = True
        while changed:
            changed = False
            for clause in clauses:
                unassigned = None
                satisfied = False
                count = 0
                for lit in clause:
                    val = assign.get(abs(lit))
                    if val is None:
                        unassigned, count = lit, count + 1
                    elif val == (lit > 0):
                        satisfied = True
                        break
                if satisfied:
                    continue
                if count == 0:
                    return False
                if count == 1:
                    assign[abs(unassigned)] = unassigned > 0
                    changed = True
        return True

    def search(assign):
        assign = dict(assign)
        if not propagate(assign):
            return None
        var = next((v for v in range(1, cnf.num_vars + 1) if v not in assign),
                   None)
        if var is None:
            return assign
        for value in (True, False):
            result = search({**assign, var: value})
            if result is not None:
                return result
        return None

    result = search({})
    if result is None:
        return None
    for v in range(1, cnf.num_vars + 1):
        result.setdefault(v, True)
    return result


# ---------------------------------------------------------------------------
# 3-coloring
# ---------------------------------------------------------------------------

def solve_3coloring(g: nx.Graph) -> Optional[Dict[int, int]]:
    """Proper 3-coloring by backtracking with forward checking.

    Vertices are tried in degree-descending order (ties by label); the
    first vertex is fixed to color 0 for symmetry breaking.
    """
    order = sorted(g.nodes(), key=lambda v: (-g.degree(v), v))
    if not order:
        return {}
    domains = {v: {0, 1, 2} for v in order}
    domains[order[0]] = {0}
    coloring: Dict[int, int] = {}

    def assign(k):
        if k == len(order):
            return True
        v = order[k]
        for color in sorted(domains[v]):
            coloring[v] = color
            removed = []
            ok = True
            for u in g[v]:
                if u not in coloring and color in domains[u]:
                    domains[u].discard(color)
                    removed.append(u)
                    if not domains[u]:
                        ok = False
                        break
            if ok and assign(k + 1):
                return True
            for u in removed:
                domains[u].add(color)
            del coloring[v]
        return False

    return dict(coloring) if assign(0) else None


# ---------------------------------------------------------------------------
# Row-transversal clique / biclique search
# ---------------------------------------------------------------------------

def solve_row_clique(g: GridGraph) -> Optional[RowSelection]:
    """One vertex per row forming a clique, or None.

    Branch and bound with forward checking: every unassigned row keeps the
    mask of columns compatible with the partial selection, the row with
    the fewest candidates is branched next (ties by row index), and any
    empty mask prunes.  Deterministic; on fully compatible instances the
    lexicographically first selection is returned.
    """
    if g.kind != "clique":
        raise InvalidInputError("row-clique search expects an n x n grid")
    side = g.side
    blocks = g.adj.reshape(side, side, side, side)
    # Row pairs where every column pair is adjacent constrain nothing;
    # the search only propagates and backjumps along the remaining pairs.
    full = blocks.all(axis=(1, 3))
    np.fill_diagonal(full, True)
    degree = (~full).sum(axis=1)
    choice = [0] * side

    neighbors = [np.nonzero(~full[k])[0] for k in range(side)]
    last_wipe = [-1]

    def propagate(cand, dirty):
        """AC-3 along constrained row pairs; False on a wiped-out row,
        which is remembered for the last-conflict branching heuristic."""
        queue = list(dirty)
        in_queue = set(queue)
        while queue:
            src = queue.pop()
            in_queue.discard(src)
            support = np.nonzero(cand[src])[0]
            for row in neighbors[src]:
                supported = blocks[row, :, src][:, support].any(axis=1)
                new = cand[row] & supported
                count = int(new.sum())
                if count != int(cand[row].sum()):
                    if count == 0:
                        last_wipe[0] = int(row)
                        return False
                    cand[row] = new
                    if row not in in_queue:
                        queue.append(row)
                        in_queue.add(row)
        return True

    def split(cols):
        """Partition candidate columns along the coarsest aligned block
        boundary (powers of 3, matching the ternary word layout of
        Gray-coded grids; an arbitrary deterministic split elsewhere)."""
        width = 1
        while width * 3 <= int(cols[-1]):
            width *= 3
        while width >= 1:
            groups = cols // width
            if groups[0] != groups[-1]:
                return [cols[groups == v] for v in np.unique(groups)]
            width //= 3
        return [cols]

    def search(cand):
        """Branch by splitting the candidate set of the tightest open row.

        With arc consistency restored after every split, all-singleton
        domains are mutually adjacent, so reaching them is success.
        The row that wiped out most recently is branched first (the
        last-conflict heuristic keeps the search at the failure site);
        otherwise fewest candidates, most constrained pairs, lowest
        index.  Lower blocks are tried first, keeping the selection
        lexicographically first on fully compatible instances.
        """
        counts = cand.sum(axis=1)
        open_rows = np.nonzero(counts > 1)[0]
        if open_rows.size == 0:
            for k in range(side):
                choice[k] = int(np.nonzero(cand[k])[0][0]) + 1
            return True
        if last_wipe[0] in open_rows:
            row = last_wipe[0]
        else:
            row = min(open_rows,
                      key=lambda k: (counts[k], -int(degree[k]), k))
        for part in split(np.nonzero(cand[row])[0]):
            nxt = cand.copy()
            nxt[row] = False
            nxt[row, part] = True
            if propagate(nxt, [row]) and search(nxt):
                return True
        return False

    cand = np.ones((side, side), dtype=bool)
    if propagate(cand, list(range(side))) and search(cand):
        return RowSelection(tuple(choice))
    return None


def solve_row_biclique(h: GridGraph) -> Optional[RowSelection]:
    """One vertex per row forming a K_{n,n} across the two halves, or None.

    The bipartite structure condition is checked first; search then runs
    on the top-vs-bottom cross adjacency with the same forward-checking
    scheme as :func:`solve_row_clique`.  Top rows select columns in
    [1, n], bottom rows in [n+1, 2n].
    """
    from permcsp import validate

    report = validate.check_biclique_structure(h)
    if not report.holds:
        raise InvalidInputError("input violates the biclique structure: "
                                + "; ".join(map(str, report.violations[:3])))
    n = h.side // 2
    blocks = h.cross_matrix().reshape(n, n, n, n)   # [i, j, i', j']
    full = blocks.all(axis=(1, 3))                  # [i, i'] fully compatible
    degree = np.concatenate([(~full).sum(axis=1), (~full).sum(axis=0)])
    top_nbrs = [np.nonzero(~full[k])[0] + n for k in range(n)]
    bot_nbrs = [np.nonzero(~full[:, k])[0] for k in range(n)]
    neighbors = top_nbrs + bot_nbrs
    choice = [0] * (2 * n)
    last_wipe = [-1]

    def propagate(cand, dirty):
        """AC-3 over top/bottom row pairs on the cross adjacency; False
        on a wiped-out row, remembered for last-conflict branching."""
        queue = list(dirty)
        in_queue = set(queue)
        while queue:
            src = queue.pop()
            in_queue.discard(src)
            support_cols = np.nonzero(cand[src])[0]
            src_top = src < n
            for row in neighbors[src]:
                if src_top:
                    mat = blocks[src % n, :, row % n, :].T
                else:
                    mat = blocks[row % n, :, src % n, :]
                supported = mat[:, support_cols].any(axis=1)
                new = cand[row] & supported
                count = int(new.sum())
                if count != int(cand[row].sum()):
                    if count == 0:
                        last_wipe[0] = int(row)
                        return False
                    cand[row] = new
                    if row not in in_queue:
                        queue.append(row)
                        in_queue.add(row)
        return True

    def split(cols):
        """Same aligned-block partition as in :func:`solve_row_clique`."""
        width = 1
        while width * 3 <= int(cols[-1]):
            width *= 3
        while width >= 1:
            groups = cols // width
            if groups[0] != groups[-1]:
                return [cols[groups == v] for v in np.unique(groups)]
            width //= 3
        return [cols]

    def search(cand):
        counts = cand.sum(axis=1)
        open_rows = np.nonzero(counts > 1)[0]
        if open_rows.size == 0:
            for k in range(2 * n):
                j = int(np.nonzero(cand[k])[0][0])
                choice[k] = (j + 1) if k < n else (n + j + 1)
            return True
        if last_wipe[0] in open_rows:
            row = last_wipe[0]
        else:
            row = min(open_rows,
                      key=lambda k: (counts[k], -int(degree[k]), k))
        for part in split(np.nonzero(cand[row])[0]):
            nxt = cand.copy()
            nxt[row] = False
            nxt[row, part] = True
            if propagate(nxt, [row]) and search(nxt):
                return True
        return False

    # cand[row] holds candidate columns: offsets in [0, n) within the
    # row's own half (top rows choose in [1, n], bottom in [n+1, 2n]).
    cand = np.ones((2 * n, n), dtype=bool)
    if propagate(cand, list(range(2 * n))) and search(cand):
        return RowSelection(tuple(choice))
    return None


# ---------------------------------------------------------------------------
# Convenient-ordering search for arity-4 reduction outputs
# ---------------------------------------------------------------------------

def solve_convenient(cert: ReductionCertificate, h: GridGraph,
                     D: Optional[int] = None) -> SolveResult:
    """Maximize over convenient orderings d_1..d_m c_1 R_1 ... c_{2n+1}.

    Enumerates every row-to-interval assignment phi exhaustively (kept
    dumb on purpose -- this is an oracle), scores each with the closed
    form  C(m,2)*C(2n+1,2) + (n+2)*sum(Delta) + |E(H[V_phi])|, and for
    every phi materializes the ordering and re-checks the closed form
    against the evaluator; any disagreement raises
    :class:`InternalConsistencyError`.
    """
    from math import comb

    from permcsp import validate
    from permcsp.reductions import reduce_dcnnb_to_perm4

    if cert.kind != "perm4":
        raise InvalidInputError("convenient-ordering search needs an arity-4 "
                                "reduction certificate")
    if h.kind != "biclique" or h.side != 2 * cert.n:
        raise InvalidInputError("certificate and grid dimensions disagree")
    if D is None:
        D = cert.D
    regenerated = reduce_dcnnb_to_perm4(h, D=D, dummy_count=len(cert.dummy_vars))
    if sorted(regenerated.instance.constraints) != sorted(cert.instance.constraints):
        raise InvalidInputError("certificate does not match the given grid")

    n = cert.n
    m = len(cert.dummy_vars)
    _, delta = validate.check_regularity(h)
    delta_sum = int(delta[:n, n:].sum())
    base = comb(m, 2) * comb(2 * n + 1, 2) + (n + 2) * delta_sum
    cross = h.cross_matrix()

    best, best_witness, nodes = -1, None, 0
    for phi_top in itertools.product(range(1, n + 1), repeat=n):
        for phi_bot in itertools.product(range(n + 1, 2 * n + 1), repeat=n):
            nodes += 1
            sel = RowSelection(phi_top + phi_bot)
            edges = 0
            for i in range(n):
                a = i * n + (phi_top[i] - 1)
                for ip in range(n):
                    b = ip * n + (phi_bot[ip] - n - 1)
                    edges += int(cross[a, b])
            count = base + edges
            ordering = validate.map_selection_to_ordering(sel, cert)
            measured = evaluate(cert.instance, ordering)
            if measured != count:
                raise InternalConsistencyError(
                    "closed form says %d, evaluator says %d for phi=%s"
                    % (count, measured, sel.choice)
                )
            if count > best:
                best, best_witness = count, ordering
    return SolveResult(best, best_witness, nodes)
