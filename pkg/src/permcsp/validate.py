"""Condition checkers, closed-form counts, and witness mappers.

The checkers recompute everything from adjacency; delta tables and
stability metadata carried by a grid are advisory and never trusted.
"""

from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Optional, Tuple

import numpy as np

from permcsp.core import InvalidInputError, Ordering
from permcsp.reductions import GridGraph, ReductionCertificate
from permcsp.solvers import RowSelection

_MAX_VIOLATIONS = 20


@dataclass(frozen=True)
class ConditionReport:
    condition: str          # "regularity" | "stability" | "bipartite-symmetry"
    holds: bool
    violations: Tuple = ()

    def lines(self) -> List[str]:
        """Line-oriented diagnostic form, consumed by the CLI."""
        out = ["check %s %s" % (self.condition, "pass" if self.holds else "fail")]
        out.extend("  violation %s" % (v,) for v in self.violations)
        return out


def _report(condition, violations):
    return ConditionReport(condition, not violations,
                           tuple(violations[:_MAX_VIOLATIONS]))


# ---------------------------------------------------------------------------
# Condition checkers
# ---------------------------------------------------------------------------

def check_regularity(g: GridGraph) -> Tuple[ConditionReport, Optional[np.ndarray]]:
    """Constant row-pair degree: deg((i,j), R_k) independent of j.

    For clique grids every ordered row pair is checked; for biclique grids
    the pairs crossing the halves are (only edges there can exist, given
    the structure condition).  Returns the computed delta table when the
    condition holds.
    """
    side = g.side
    violations = []
    delta = np.zeros((side, side), dtype=np.int64)
    if g.kind == "clique":
        deg = g.adj.reshape(side, side, side, side).sum(axis=3)   # (i, j, k)
        for i in range(side):
            for k in range(side):
                col = deg[i, :, k]
                if col.min() != col.max():
                    j = int(np.argmax(col != col[0]))
                    violations.append((i + 1, k + 1, j + 1,
                                       "degree %d != %d" % (col[j], col[0])))
                else:
                    delta[i, k] = int(col[0])
    else:
        n = side // 2
        cross = g.cross_matrix().reshape(n, n, n, n)
        deg_top = cross.sum(axis=3)          # (i, j, i')
        deg_bot = cross.sum(axis=1)          # (i, i', j') -> degree of bottom vertex
        for i in range(n):
            for k in range(n):
                col = deg_top[i, :, k]
                if col.min() != col.max():
                    j = int(np.argmax(col != col[0]))
                    violations.append((i + 1, n + k + 1, j + 1,
                                       "degree %d != %d" % (col[j], col[0])))
                else:
                    delta[i, n + k] = int(col[0])
                col = deg_bot[i, k, :]
                if col.min() != col.max():
                    j = int(np.argmax(col != col[0]))
                    violations.append((n + k + 1, i + 1, j + 1,
                                       "degree %d != %d" % (col[j], col[0])))
                else:
                    delta[n + k, i] = int(col[0])
    report = _report("regularity", violations)
    return report, (delta if report.holds else None)


def check_stability(g: GridGraph, D: int
                    ) -> Tuple[ConditionReport, Optional[np.ndarray]]:
    """Consecutive-column neighborhoods identical outside at most D rows.

    For each vertex (i, j) with a right neighbor column, counts the rows k
    where N(i,j) and N(i,j+1) differ inside R_k; the condition demands the
    count never exceeds D.  Returns, when it holds, the boolean array
    ``stable[i, j, k]`` of rows where the neighborhoods agree (the I_{i,j}
    witness sets).
    """
    side = g.side
    violations = []
    if g.kind == "clique":
        stable = np.zeros((side, side - 1, side), dtype=bool)
        for i in range(side):
            rows = g.adj[i * side:(i + 1) * side].reshape(side, side, side)
            diff = rows[:-1] != rows[1:]            # (j, k, column)
            bad = diff.any(axis=2)                  # (j, k)
            stable[i] = ~bad
            counts = bad.sum(axis=1)
            for j in np.nonzero(counts > D)[0]:
                violations.append((i + 1, int(j) + 1,
                                   "%d unstable rows > D=%d" % (counts[j], D)))
    else:
        n = side // 2
        cross = g.cross_matrix().reshape(n, n, n, n)
        stable = np.zeros((n, n - 1, n), dtype=bool) if n > 1 else \
            np.zeros((n, 0, n), dtype=bool)
        for i in range(n):
            diff = cross[i, :-1] != cross[i, 1:]    # (j, i', j')
            bad = diff.any(axis=2)
            stable[i] = ~bad
            counts = bad.sum(axis=1)
            for j in np.nonzero(counts > D)[0]:
                violations.append((i + 1, int(j) + 1,
                                   "%d unstable rows > D=%d" % (counts[j], D)))
    report = _report("stability", violations)
    return report, (stable if report.holds else None)


def check_biclique_structure(h: GridGraph) -> ConditionReport:
    """Bipartite placement and symmetry of a 2n x 2n biclique grid.

    Every edge must join a top vertex (i <= n, j <= n) to a bottom vertex
    (i > n, j > n), and (i,j)(n+i',n+j') must be an edge exactly when
    (i',j')(n+i,n+j) is.
    """
    if h.side % 2:
        raise InvalidInputError("biclique grids need an even side")
    side = h.side
    n = side // 2
    violations = []
    in_top = np.zeros(side * side, dtype=bool)
    in_bottom = np.zeros(side * side, dtype=bool)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            in_top[(i - 1) * side + (j - 1)] = True
            in_bottom[(n + i - 1) * side + (n + j - 1)] = True

    # Fast path: every directed edge lies in the top-vs-bottom block iff
    # the total degree equals twice the block's edge count.  Only when
    # that fails is the full matrix scanned to name the offenders.
    adj4 = h.adj.reshape(side, side, side, side)
    cross = np.ascontiguousarray(adj4[:n, :n, n:, n:]).reshape(n * n, n * n)
    if int(h.adj.sum()) == 2 * int(cross.sum()):
        asym = cross != cross.T
        for a, b in zip(*np.nonzero(asym)):
            i, j = int(a) // n + 1, int(a) % n + 1
            ip, jp = int(b) // n + 1, int(b) % n + 1
            violations.append(((i, j), (n + ip, n + jp), "symmetry partner missing"))
            if len(violations) >= _MAX_VIOLATIONS:
                break
        return _report("bipartite-symmetry", violations)

    chunk = 2048
    total = side * side
    for lo in range(0, total, chunk):
        hi = min(lo + chunk, total)
        block = h.adj[lo:hi]
        local_top = in_top[lo:hi]
        local_bottom = in_bottom[lo:hi]
        misplaced = block.copy()
        misplaced[local_top] &= ~in_bottom
        misplaced[local_bottom] &= ~in_top
        misplaced[~(local_top | local_bottom)] = block[~(local_top | local_bottom)]
        for u, v in zip(*np.nonzero(misplaced)):
            i1, j1 = (lo + int(u)) // side + 1, (lo + int(u)) % side + 1
            i2, j2 = int(v) // side + 1, int(v) % side + 1
            violations.append(((i1, j1), (i2, j2), "edge outside the bipartite blocks"))
            if len(violations) >= _MAX_VIOLATIONS:
                break
        if len(violations) >= _MAX_VIOLATIONS:
            break

    if not violations:
        top = np.nonzero(in_top)[0]
        bottom = np.nonzero(in_bottom)[0]
        cross = h.adj[np.ix_(top, bottom)]
        asym = cross != cross.T
        for a, b in zip(*np.nonzero(asym)):
            i, j = int(a) // n + 1, int(a) % n + 1
            ip, jp = int(b) // n + 1, int(b) % n + 1
            violations.append(((i, j), (n + ip, n + jp), "symmetry partner missing"))
            if len(violations) >= _MAX_VIOLATIONS:
                break
    return _report("bipartite-symmetry", violations)


# ---------------------------------------------------------------------------
# Closed-form counts
# ---------------------------------------------------------------------------

def structural_count(dummy_count: int, num_columns: int) -> int:
    """C(d, 2) * C(columns, 2): dummy-pair x column-pair constraints."""
    if dummy_count < 0 or num_columns < 0:
        raise InvalidInputError("counts must be nonnegative")
    return comb(dummy_count, 2) * comb(num_columns, 2)


def target_perm6(n: int, dummy_count: int) -> int:
    """Yes-target of the arity-6 reduction: |C_S1| + |C_S2| + C(n,2)."""
    if n < 1 or dummy_count < 0:
        raise InvalidInputError("bad parameters")
    return comb(dummy_count, 4) * comb(n + 1, 2) + n + comb(n, 2)


def target_perm4(n: int, D: int, dummy_count: int, delta_sum: int) -> int:
    """Yes-target of the arity-4 reduction:
    C(d,2)*C(2n+1,2) + (n+2)*sum(Delta) + n^2."""
    if n < 1 or D < 1 or dummy_count < 0 or delta_sum < 0:
        raise InvalidInputError("bad parameters")
    return structural_count(dummy_count, 2 * n + 1) + (n + 2) * delta_sum + n * n


# ---------------------------------------------------------------------------
# Witness mappers
# ---------------------------------------------------------------------------

def map_coloring_to_selection(coloring: Dict[int, int],
                              grid: GridGraph) -> RowSelection:
    """Proper 3-coloring of the source graph -> row selection of the grid.

    Padding vertices (absent from the coloring) default to color 0; their
    color never matters because they are isolated.
    """
    from permcsp.reductions import ternary_gray

    blocks = grid.meta.get("blocks")
    x = grid.meta.get("x")
    if blocks is None or x is None:
        raise InvalidInputError("grid carries no block metadata")
    gray = ternary_gray(x)
    choice = []
    for block in blocks:
        word = tuple(coloring.get(v, 0) for v in block)
        choice.append(gray.rank(word) + 1)
    return RowSelection(tuple(choice))


def map_selection_to_coloring(sel: RowSelection,
                              grid: GridGraph) -> Dict[int, int]:
    """Row selection of the grid -> coloring of the original vertices."""
    from permcsp.reductions import ternary_gray

    blocks = grid.meta.get("blocks")
    x = grid.meta.get("x")
    num_original = grid.meta.get("num_original")
    if blocks is None or x is None or num_original is None:
        raise InvalidInputError("grid carries no block metadata")
    if len(sel.choice) != len(blocks):
        raise InvalidInputError("selection and grid disagree on row count")
    gray = ternary_gray(x)
    coloring = {}
    for block, j in zip(blocks, sel.choice):
        word = gray.words[j - 1]
        for v, color in zip(block, word):
            if v <= num_original:
                coloring[v] = color
    return coloring


def map_clique_to_biclique(sel: RowSelection) -> RowSelection:
    """Clique selection (i, j_i) -> biclique selection {(i,j_i), (n+i,n+j_i)}."""
    n = len(sel.choice)
    return RowSelection(tuple(sel.choice) + tuple(j + n for j in sel.choice))


def map_selection_to_ordering(sel: RowSelection,
                              cert: ReductionCertificate) -> Ordering:
    """Build the convenient ordering d_1..d_m c_1 R_1 c_2 ... c_last.

    Row element r_i goes into interval R_{phi(i)}; within an interval rows
    are ordered by ascending row index (the tie rule that satisfies the
    same-column constraint shapes).
    """
    num_rows = len(cert.row_vars)
    num_intervals = len(cert.col_vars) - 1
    if len(sel.choice) != num_rows:
        raise InvalidInputError("selection has %d rows, certificate has %d"
                                % (len(sel.choice), num_rows))
    if cert.kind == "perm4":
        n = cert.n
        for i, k in enumerate(sel.choice, start=1):
            lo, hi = (1, n) if i <= n else (n + 1, 2 * n)
            if not lo <= k <= hi:
                raise InvalidInputError(
                    "row %d assigned interval %d outside [%d, %d]" % (i, k, lo, hi)
                )
    else:
        for i, k in enumerate(sel.choice, start=1):
            if not 1 <= k <= num_intervals:
                raise InvalidInputError(
                    "row %d assigned interval %d outside [1, %d]"
                    % (i, k, num_intervals)
                )
    seq = list(cert.dummy_vars)
    for k in range(1, num_intervals + 1):
        seq.append(cert.col_vars[k - 1])
        seq.extend(cert.row_vars[i] for i in range(num_rows)
                   if sel.choice[i] == k)
    seq.append(cert.col_vars[-1])
    return Ordering.from_sequence(seq)
