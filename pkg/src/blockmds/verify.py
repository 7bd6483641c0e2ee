"""Independent certification of constructed codes.

Girth is measured on the actual Tanner graph by breadth-first search from
every edge (truncated at a cap), with no reference to the algebraic
conditions it is meant to confirm.  The 4-cycle predicates, the circulant
girth closed form, the pairwise/quad difference-set conditions, the MDS
rank oracle, the Moore gcd criterion, and the three determinant routes
(direction-vector product, cofactor expansion, Schur-style expansion) are
each implemented from their own definition so they can cross-check one
another.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field as dc_field
from itertools import combinations, permutations, product
from math import comb, gcd
import random
from typing import Optional, Sequence

from .gfmatrix import BlockPlan, GFMatrix, NonSquareError, expand, ring_grid_det
from .ring import (RingPoly, ZeroPolynomialError, delta_set, gcd_with_modulus,
                   index_set, poly_x_minus_one, set_sum)


class VerifyError(ValueError):
    pass


class OversizeError(VerifyError):
    pass


class UncertifiedDistanceError(VerifyError):
    pass


# ----------------------------------------------------------------------------
# Tanner graph and girth
# ----------------------------------------------------------------------------

@dataclass
class TannerGraph:
    """Bipartite adjacency between check nodes and variable nodes."""

    n_checks: int
    n_vars: int
    adj: list[list[int]]          # vertex -> neighbors; vars offset by n_checks
    edges: list[tuple[int, int]]  # (check vertex, var vertex)

    @classmethod
    def from_matrix(cls, h: GFMatrix) -> "TannerGraph":
        nr, nc = h.nrows, h.ncols
        adj: list[list[int]] = [[] for _ in range(nr + nc)]
        edges = []
        for i in range(nr):
            for j in h.row_support(i):
                v = nr + j
                adj[i].append(v)
                adj[v].append(i)
                edges.append((i, v))
        return cls(nr, nc, adj, edges)


@dataclass(frozen=True)
class GirthReport:
    """Exact girth when determined; `exceeds` is a proven strict lower bound
    when the search was truncated; `acyclic` means no cycles exist at all."""

    girth: Optional[int]
    exceeds: Optional[int] = None
    acyclic: bool = False
    witness: Optional[tuple] = None


def girth(h: GFMatrix | TannerGraph, cap: int = 12,
          want_witness: bool = False) -> GirthReport:
    """Exact Tanner-graph girth up to `cap`, by BFS from every edge.

    For each edge (c, v) the search finds the shortest alternative path from
    c to v; the minimum of path+1 over all edges is the girth.  Searches are
    truncated at the depth that could still improve the best cycle found.
    """
    if cap < 4 or cap % 2:
        raise VerifyError("cap must be an even integer >= 4")
    g = h if isinstance(h, TannerGraph) else TannerGraph.from_matrix(h)
    V = g.n_checks + g.n_vars
    adj = g.adj
    best = cap + 2
    best_witness = None
    seen = [0] * V
    dist = [0] * V
    parent = [-1] * V
    stamp = 0
    truncated = False
    for (c, v) in g.edges:
        if best == 4:
            break
        limit = best - 3  # a strictly shorter cycle needs a path <= best-3
        stamp += 1
        seen[c] = stamp
        dist[c] = 0
        parent[c] = -1
        q = deque((c,))
        found = None
        found_from = None
        while q:
            u = q.popleft()
            du = dist[u]
            if du >= limit:
                truncated = True
                break
            for w in adj[u]:
                if u == c and w == v:
                    continue
                if w == v:
                    found = du + 1
                    found_from = u
                    q.clear()
                    break
                if seen[w] != stamp:
                    seen[w] = stamp
                    dist[w] = du + 1
                    parent[w] = u
                    q.append(w)
        if found is not None and found + 1 < best:
            best = found + 1
            if want_witness:
                path = [found_from]
                while path[-1] != c:
                    path.append(parent[path[-1]])
                nodes = [v] + path
                best_witness = tuple(
                    ("chk", n) if n < g.n_checks else ("var", n - g.n_checks)
                    for n in nodes)
    if best <= cap:
        return GirthReport(best, witness=best_witness)
    if truncated:
        return GirthReport(None, exceeds=cap)
    return GirthReport(None, acyclic=True)


def has_four_cycles(h: GFMatrix) -> bool:
    """True iff some pair of rows shares two or more nonzero columns.

    Bitmask fast path, independent of the BFS girth search.
    """
    rows = [h.row_bits(i) for i in range(h.nrows)]
    rows = [r for r in rows if r.bit_count() >= 2]
    for a, b in combinations(rows, 2):
        if (a & b).bit_count() >= 2:
            return True
    return False


# ----------------------------------------------------------------------------
# algebraic 4-cycle conditions
# ----------------------------------------------------------------------------

def fossorier_check(expgrid: Sequence[Sequence[int]], n: int) -> bool:
    """Girth >= 6 condition for a CPM/CSM exponent grid: within every row
    pair, the per-column shift differences must be pairwise distinct mod n."""
    r = len(expgrid)
    for i1, i2 in combinations(range(r), 2):
        diffs = [(expgrid[i1][j] - expgrid[i2][j]) % n
                 for j in range(len(expgrid[i1]))]
        if len(set(diffs)) != len(diffs):
            return False
    return True


def circulant_girth(a: RingPoly) -> GirthReport:
    """Girth of the circulant of a weight-t ring element, without BFS.

    t = 2 has the closed form 2N / gcd(N, i2 - i1).  For t > 2 a distinct
    difference multiset proves girth > 4; otherwise the verdict is
    undetermined (fall back to girth() on the expansion).
    """
    n = a.ctx.size
    if n % 2 == 0:
        raise VerifyError("closed form requires odd N")
    sup = index_set(a)
    if len(sup) < 2:
        return GirthReport(None, acyclic=True)
    if len(sup) == 2:
        return GirthReport(2 * n // gcd(n, sup[1] - sup[0]))
    if delta_set(sup, n).is_set:
        return GirthReport(None, exceeds=4)
    return GirthReport(None)


def pair_four_cycle_free(a1: RingPoly, a2: RingPoly) -> bool:
    """No 4-cycles in the side-by-side pair of two circulants: both
    difference multisets are sets and they are disjoint."""
    n = a1.ctx.size
    d1 = delta_set(index_set(a1), n)
    d2 = delta_set(index_set(a2), n)
    return d1.is_set and d2.is_set and not (set(d1.values) & set(d2.values))


def quad_four_cycle_free(a11: RingPoly, a12: RingPoly, a21: RingPoly,
                         a22: RingPoly) -> tuple[bool, Optional[str]]:
    """The three-part 4-cycle-freedom condition for a 2x2 circulant grid.

    Returns (verdict, first violated condition among 'i', 'ii-vertical',
    'ii-horizontal', 'iii').
    """
    n = a11.ctx.size
    sup = {k: index_set(p) for k, p in
           (("11", a11), ("12", a12), ("21", a21), ("22", a22))}
    deltas = {}
    for k, s in sup.items():
        d = delta_set(s, n)
        if not d.is_set:
            return False, "i"
        deltas[k] = set(d.values)
    if deltas["11"] & deltas["21"] or deltas["12"] & deltas["22"]:
        return False, "ii-vertical"
    if deltas["11"] & deltas["12"] or deltas["21"] & deltas["22"]:
        return False, "ii-horizontal"
    if set_sum(sup["11"], sup["22"], n) & set_sum(sup["12"], sup["21"], n):
        return False, "iii"
    return True, None


# ----------------------------------------------------------------------------
# MDS verification
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class MdsReport:
    ok: bool
    failing: Optional[tuple[int, ...]]
    checked: int
    total: int
    exhaustive: bool


def _stacked_rank(blocks, field, size, subset) -> int:
    if field.order == 2:
        rows: list[int] = []
        for blockrow in blocks:
            for s in range(size):
                v = 0
                for pos, j in enumerate(subset):
                    v |= blockrow[j]._bits[s] << (pos * size)
                rows.append(v)
        return GFMatrix(field, len(rows), len(subset) * size, bits=rows).rank()
    import numpy as np
    arr = np.concatenate(
        [np.concatenate([blockrow[j]._arr for j in subset], axis=1)
         for blockrow in blocks], axis=0)
    return GFMatrix(field, arr.shape[0], arr.shape[1], arr=arr).rank()


def mds_exhaustive(plan: BlockPlan, max_subsets: int = 10 ** 6,
                   force: bool = False) -> MdsReport:
    """Rank-checks every r-subset of block columns (Proposition-style MDS
    criterion); short-circuits on the first failure."""
    r, m = plan.block_rows, plan.block_cols
    total = comb(m, r)
    if total > max_subsets and not force:
        raise OversizeError(
            f"{total} subsets exceed the limit {max_subsets}; "
            "use force or the sampled check")
    blocks = [[expand(s) for s in row] for row in plan.grid]
    size = plan.block_size
    target = r * size
    checked = 0
    for subset in combinations(range(m), r):
        checked += 1
        if _stacked_rank(blocks, plan.ctx.field, size, subset) != target:
            return MdsReport(False, subset, checked, total, True)
    return MdsReport(True, None, checked, total, True)


def mds_sampled(plan: BlockPlan, trials: int, seed: int = 0) -> MdsReport:
    """Seeded random r-subset rank checks; evidence, never certification."""
    r, m = plan.block_rows, plan.block_cols
    rng = random.Random(seed)
    blocks = [[expand(s) for s in row] for row in plan.grid]
    size = plan.block_size
    target = r * size
    total = comb(m, r)
    for t in range(trials):
        subset = tuple(sorted(rng.sample(range(m), r)))
        if _stacked_rank(blocks, plan.ctx.field, size, subset) != target:
            return MdsReport(False, subset, t + 1, total, False)
    return MdsReport(True, None, trials, total, False)


# ----------------------------------------------------------------------------
# Moore determinant identities and the gcd criterion
# ----------------------------------------------------------------------------

def moore_det_product(polys: Sequence[RingPoly]) -> RingPoly:
    """Product of c1*a1 + ... + cr*ar over direction vectors c in F_q^r whose
    last nonzero entry is 1: the closed form of the Moore-grid determinant."""
    ctx = polys[0].ctx
    q = ctx.field.order
    r = len(polys)
    acc = ctx.one
    for j in range(r):
        for cs in product(range(q), repeat=j):
            term = polys[j]
            for k, c in enumerate(cs):
                if c:
                    term = term + polys[k].scale(c)
            acc = acc * term
    return acc


def moore_grid(polys: Sequence[RingPoly], r: int) -> list[list[RingPoly]]:
    """The r x len(polys) grid whose row k holds the q^k-th ring powers."""
    q = polys[0].ctx.field.order
    return [[p ** (q ** k) for p in polys] for k in range(r)]


def schur_det(grid: Sequence[Sequence[RingPoly]]) -> RingPoly:
    """Signed permutation expansion of a commuting block grid's determinant;
    coincides with ring_grid_det for circulant blocks and is kept as a second
    independent oracle."""
    r = len(grid)
    if any(len(row) != r for row in grid):
        raise NonSquareError("square grid required")
    ctx = grid[0][0].ctx
    acc = ctx.zero
    for perm in permutations(range(r)):
        term = ctx.one
        for i in range(r):
            term = term * grid[i][perm[i]]
        inversions = sum(1 for i in range(r) for j in range(i + 1, r)
                         if perm[i] > perm[j])
        acc = acc - term if inversions % 2 else acc + term
    return acc


def moore_mds_condition(polys: Sequence[RingPoly]) -> bool:
    """The gcd criterion certifying the punctured Moore construction: the
    direction-vector product of the given polynomials must have
    gcd(product, x^N - 1) = x - 1."""
    ctx = polys[0].ctx
    prod = moore_det_product(polys)
    try:
        g = gcd_with_modulus(prod)
    except ZeroPolynomialError:
        return False
    return g == poly_x_minus_one(ctx.field)


# ----------------------------------------------------------------------------
# Singleton bound
# ----------------------------------------------------------------------------

def singleton_check(spec) -> bool:
    """Array-code Singleton bound with equality: log_q(size) must equal
    N' * (n_nodes + 1 - d_A).  `spec` needs subpacketization, block_cols,
    dimension (in field symbols) and a certified d_array."""
    if getattr(spec, "d_array", None) is None:
        raise UncertifiedDistanceError("spec has no certified array distance")
    rhs = spec.subpacketization * (spec.block_cols + 1 - spec.d_array)
    return spec.dimension == rhs


# ----------------------------------------------------------------------------
# certificates
# ----------------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    passed: bool
    params: dict = dc_field(default_factory=dict)
    witness: Optional[str] = None


def certificate_report(results: Sequence[CheckResult]) -> str:
    """One line per check, stable field order, diff-friendly."""
    lines = []
    for r in results:
        parts = [f"check={r.name}", f"status={'pass' if r.passed else 'FAIL'}"]
        for k in sorted(r.params):
            parts.append(f"{k}={r.params[k]}")
        if r.witness is not None:
            parts.append(f"witness={r.witness}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + ("\n" if lines else "")
