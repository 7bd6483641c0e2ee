"""Builders for the three block-MDS code families, plus the girth-8
column-selection strategy and seeded searches for suitable polynomial sets.

Families (descriptor `family:` tags):

* ``pucpm-vandermonde`` — exponent grid i*j over a prime N with q a primitive
  root, every block punctured by one row/column.  Optional column restriction
  implements the 6-cycle-elimination strategy (girth 8 instead of 6).
* ``csm-vandermonde``  — scaled CPM Vandermonde over a non-binary field,
  no puncturing, certified through the pairwise gcd criterion.
* ``moore-pucm``       — Frobenius-power rows of weight-t circulants over a
  characteristic-2 field, punctured by one; the Moore gcd criterion certifies
  the MDS property and the difference-set conditions certify 4-cycle freedom.

Builders always compute the dimension from the assembled matrix rank (never
assume it), re-verify 4-cycle freedom empirically on the built matrix, and
record every certificate outcome; `require_*` flags decide whether a failed
condition raises or is only recorded.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field as dc_field
from itertools import combinations
from math import comb
from typing import Optional, Sequence

import yaml

from .fields import Field, NotPrimeError
from .gfmatrix import BlockPlan, CirculantSpec, GFMatrix, assemble
from .ring import (RingContext, RingError, RingPoly, ZeroPolynomialError,
                   delta_set, gcd_with_modulus, is_primitive_root, poly_format)
from . import verify as vfy

FAMILY_PUCPM = "pucpm-vandermonde"
FAMILY_CSM = "csm-vandermonde"
FAMILY_MOORE = "moore-pucm"


class ConstructionError(ValueError):
    pass


class NotPrimitiveRootError(ConstructionError):
    pass


class BadJError(ConstructionError):
    pass


class BinaryFieldError(ConstructionError):
    pass


class TooManyColumnsError(ConstructionError):
    pass


class GcdConditionFailedError(ConstructionError):
    def __init__(self, i: int, j: int, gcd_text: str):
        super().__init__(f"gcd condition failed for columns ({i}, {j}): {gcd_text}")
        self.pair = (i, j)
        self.gcd_text = gcd_text


class OddWeightError(ConstructionError):
    pass


class MdsConditionError(ConstructionError):
    def __init__(self, subset: tuple[int, ...], detail: str = ""):
        super().__init__(f"Moore MDS gcd condition failed for columns {subset}"
                         + (f": {detail}" if detail else ""))
        self.subset = subset


class FourCycleConditionError(ConstructionError):
    def __init__(self, cols: tuple[int, ...], rows: tuple[int, ...], which: str):
        super().__init__(
            f"4-cycle condition {which} failed for columns {cols}, rows {rows}")
        self.cols = cols
        self.rows = rows
        self.which = which


class NoSetFoundError(ConstructionError):
    pass


class BudgetExhaustedError(ConstructionError):
    def __init__(self, found: int, needed: int):
        super().__init__(f"search budget exhausted: found {found} of {needed}")
        self.found = found
        self.needed = needed


@dataclass
class CodeSpec:
    family: str
    field: Field
    block_size: int              # N
    block_rows: int              # r (or J)
    block_cols: int              # m
    puncture: int                # tau
    length: int                  # symbols
    dimension: int               # computed: length - rank(H)
    d_array: Optional[int]       # design array distance, None if uncertified
    params: dict = dc_field(default_factory=dict)
    certificates: dict = dc_field(default_factory=dict)

    @property
    def subpacketization(self) -> int:
        return self.block_size - self.puncture

    @property
    def rate(self) -> float:
        return self.dimension / self.length


@dataclass
class BuiltCode:
    spec: CodeSpec
    plan: BlockPlan
    matrix: GFMatrix

    @property
    def n(self) -> int:
        return self.spec.length

    @property
    def k(self) -> int:
        return self.spec.dimension


def _as_field(field_or_q) -> Field:
    if isinstance(field_or_q, Field):
        return field_or_q
    return Field(int(field_or_q), 1)


def plan_exponent_grid(plan: BlockPlan) -> list[list[int]]:
    """Shift exponents of a CPM/CSM plan (every block a scaled monomial)."""
    grid = []
    for row in plan.grid:
        out = []
        for spec in row:
            sup = spec.poly.support
            if len(sup) != 1:
                raise ConstructionError("plan has a non-monomial block")
            out.append(sup[0])
        grid.append(out)
    return grid


# ----------------------------------------------------------------------------
# family 1: punctured CPM Vandermonde
# ----------------------------------------------------------------------------

def cpm_vandermonde_plan(field_or_q, n: int, r: int, tau: int = 0,
                         columns: Optional[Sequence[int]] = None) -> BlockPlan:
    """The raw Vandermonde-of-CPMs plan: block (i, j) = P_N^{(i * c_j) mod N},
    optionally punctured and/or restricted to a column label subset."""
    field = _as_field(field_or_q)
    ctx = RingContext(field, n)
    cols = list(range(n)) if columns is None else [c % n for c in columns]
    grid = [[CirculantSpec(ctx.monomial((i * c) % n), puncture=tau)
             for c in cols] for i in range(r)]
    return BlockPlan.make(ctx, grid)


def build_pucpm_vandermonde(field_or_q, n: int, j_rows: int,
                            columns: Optional[Sequence[int]] = None,
                            tau: int = 1) -> BuiltCode:
    """Block MDS code from punctured CPMs on a Vandermonde exponent grid.

    Requires N an odd prime with the field order a primitive root mod N
    (this is what collapses every pairwise monomial gcd to x - 1).
    """
    field = _as_field(field_or_q)
    if not 2 <= j_rows <= n - 1:
        raise BadJError(f"block rows must be in [2, {n - 1}]")
    try:
        if n % 2 == 0 or not is_primitive_root(field.order, n):
            raise NotPrimitiveRootError(
                f"{field.order} is not a primitive root modulo {n}")
    except (NotPrimeError, RingError) as exc:
        raise NotPrimitiveRootError(str(exc)) from exc
    if columns is not None and len(set(c % n for c in columns)) != len(columns):
        raise ConstructionError("restriction columns must be distinct labels")
    plan = cpm_vandermonde_plan(field, n, j_rows, tau=tau, columns=columns)
    h = assemble(plan)
    rank = h.rank()
    length = h.ncols
    certificates = {
        "four_cycle_free": not vfy.has_four_cycles(h),
        "full_row_rank": rank == h.nrows,
    }
    # any r-subset of a restricted column set is an r-subset of the full one,
    # so the gcd certificate survives restriction; puncturing is what it needs
    mds_certified = tau == 1
    if mds_certified:
        certificates["mds"] = {"ok": True, "basis": "primitive-root gcd criterion"}
    params = {"J": j_rows}
    if columns is not None:
        params["columns"] = list(columns)
    if tau != 1:
        params["tau"] = tau
    d_array = j_rows + 1 if mds_certified and plan.block_cols > j_rows else None
    spec = CodeSpec(
        family=FAMILY_PUCPM, field=field, block_size=n, block_rows=j_rows,
        block_cols=plan.block_cols, puncture=tau, length=length,
        dimension=length - rank, d_array=d_array,
        params=params, certificates=certificates)
    return BuiltCode(spec, plan, h)


# ----------------------------------------------------------------------------
# family 2: CSM Vandermonde (non-binary, no puncturing)
# ----------------------------------------------------------------------------

def build_csm_vandermonde(field: Field, n: int, r: int,
                          shifts: Sequence[int],
                          scales: Sequence[int]) -> BuiltCode:
    """Scaled-CPM Vandermonde block MDS code: block (i, j) is
    s_j^i * P_N^{(i * t_j) mod N}; certified by the pairwise gcd criterion
    gcd(s_i x^{t_i} - s_j x^{t_j}, x^N - 1) = 1."""
    if field.order == 2:
        raise BinaryFieldError("a non-binary field is required")
    m = len(shifts)
    if len(scales) != m:
        raise ConstructionError("shifts and scales must have equal length")
    if m > field.order - 1:
        raise TooManyColumnsError(
            f"{m} columns need at least {m} distinct nonzero scales, "
            f"field has {field.order - 1}")
    if not 1 <= r < m <= n:
        raise ConstructionError("need 1 <= r < m <= N")
    if any(s == 0 or not 0 < s < field.order for s in scales):
        raise ConstructionError("scales must be nonzero field labels")
    if len(set(s % n for s in shifts)) != m or len(set(scales)) != m:
        raise ConstructionError("shifts (mod N) and scales must be distinct")
    ctx = RingContext(field, n)
    for i, j in combinations(range(m), 2):
        diff = ctx.monomial(shifts[i] % n, scales[i]) - ctx.monomial(
            shifts[j] % n, scales[j])
        try:
            g = gcd_with_modulus(diff)
        except ZeroPolynomialError:
            raise GcdConditionFailedError(i, j, "zero difference") from None
        if g != (1,):
            raise GcdConditionFailedError(i, j, poly_format(g))
    grid = [[CirculantSpec(ctx.monomial((i * shifts[j]) % n),
                           scale=field.label_pow(scales[j], i))
             for j in range(m)] for i in range(r)]
    plan = BlockPlan.make(ctx, grid)
    h = assemble(plan)
    rank = h.rank()
    length = h.ncols
    certificates = {
        "four_cycle_free": not vfy.has_four_cycles(h),
        "full_row_rank": rank == h.nrows,
        "gcd_condition": {"ok": True, "pairs": m * (m - 1) // 2},
        "mds": {"ok": True, "basis": "pairwise gcd criterion"},
    }
    spec = CodeSpec(
        family=FAMILY_CSM, field=field, block_size=n, block_rows=r,
        block_cols=m, puncture=0, length=length, dimension=length - rank,
        d_array=r + 1, params={"shifts": list(shifts), "scales": list(scales)},
        certificates=certificates)
    return BuiltCode(spec, plan, h)


# ----------------------------------------------------------------------------
# family 3: Moore-form punctured circulants (characteristic 2)
# ----------------------------------------------------------------------------

def _moore_condition_report(polys: Sequence[RingPoly], r: int,
                            max_failures: int = 64) -> dict:
    """Evaluates the Moore gcd criterion on every r-subset; collects failures."""
    m = len(polys)
    failures = []
    for subset in combinations(range(m), r):
        if not vfy.moore_mds_condition([polys[i] for i in subset]):
            failures.append(subset)
            if len(failures) >= max_failures:
                break
    return {"ok": not failures, "subsets": comb(m, r), "failures": failures}


def _moore_girth_report(polys: Sequence[RingPoly], r: int,
                        max_failures: int = 64) -> dict:
    """Difference-set 4-cycle conditions across all column/row pairs."""
    q = polys[0].ctx.field.order
    m = len(polys)
    failures = []

    def record(cols, rows, which):
        failures.append({"cols": cols, "rows": rows, "which": which})

    if r == 1:
        for i, j in combinations(range(m), 2):
            if not vfy.pair_four_cycle_free(polys[i], polys[j]):
                record((i, j), (0,), "pair")
    else:
        powers = [[p ** (q ** k) for k in range(r)] for p in polys]
        for i, j in combinations(range(m), 2):
            for ka, kb in combinations(range(r), 2):
                ok, which = vfy.quad_four_cycle_free(
                    powers[i][ka], powers[j][ka], powers[i][kb], powers[j][kb])
                if not ok:
                    record((i, j), (ka, kb), which)
                    break
            if len(failures) >= max_failures:
                break
    return {"ok": not failures, "failures": failures}


def build_moore_pucm(field: Field, n: int, r: int,
                     polys: Sequence[RingPoly], *,
                     require_mds: bool = True,
                     require_girth: bool = True) -> BuiltCode:
    """Block MDS LDPC code from Frobenius-power rows of weight-t circulants,
    each block punctured by one row/column.

    Row k holds the q^k-th ring powers of the column polynomials.  The Moore
    gcd criterion (an r-subset product having gcd x - 1 with x^N - 1) certifies
    the MDS property; the difference-set conditions certify girth > 4.  With
    `require_mds`/`require_girth` off, violations are recorded in the
    certificates instead of raising, and the code is still built.
    """
    if field.characteristic != 2:
        raise ConstructionError("a characteristic-2 field is required")
    m = len(polys)
    if not 1 <= r < m:
        raise ConstructionError("need 1 <= r < m")
    ctx = polys[0].ctx
    if ctx.field != field or ctx.size != n or any(p.ctx != ctx for p in polys):
        raise ConstructionError("polynomials come from a different ring")
    weights = {p.weight for p in polys}
    if len(weights) != 1:
        raise ConstructionError("all polynomials must share one support weight")
    t = weights.pop()
    if t % 2 or t < 2:
        raise OddWeightError(f"support weight must be even >= 2, got {t}")

    mds_report = _moore_condition_report(polys, r)
    if require_mds and not mds_report["ok"]:
        raise MdsConditionError(tuple(mds_report["failures"][0]))
    girth_report = _moore_girth_report(polys, r)
    if require_girth and not girth_report["ok"]:
        f = girth_report["failures"][0]
        raise FourCycleConditionError(tuple(f["cols"]), tuple(f["rows"]),
                                      f["which"])

    q = field.order
    grid = [[CirculantSpec(polys[i] ** (q ** k), puncture=1)
             for i in range(m)] for k in range(r)]
    plan = BlockPlan.make(ctx, grid)
    h = assemble(plan)
    rank = h.rank()
    length = h.ncols
    certificates = {
        "four_cycle_free": not vfy.has_four_cycles(h),
        "full_row_rank": rank == h.nrows,
        "moore_mds_condition": mds_report,
        "four_cycle_conditions": girth_report,
    }
    if mds_report["ok"]:
        certificates["mds"] = {"ok": True, "basis": "Moore gcd criterion"}
    spec = CodeSpec(
        family=FAMILY_MOORE, field=field, block_size=n, block_rows=r,
        block_cols=m, puncture=1, length=length, dimension=length - rank,
        d_array=r + 1 if mds_report["ok"] else None,
        params={"polys": [ctx.format(p) for p in polys], "weight": t},
        certificates=certificates)
    return BuiltCode(spec, plan, h)


# ----------------------------------------------------------------------------
# girth-8 column selection for the CPM Vandermonde family
# ----------------------------------------------------------------------------

def _row_gap_patterns(row_count: int) -> list[tuple[int, int]]:
    pats = set()
    for r1, r2, r3 in combinations(range(row_count), 3):
        pats.add((r2 - r1, r3 - r2))
    return sorted(pats)


def check_girth8_columns(labels: Sequence[int], n: int,
                         row_count: int = 3) -> Optional[tuple]:
    """6-cycle-elimination condition for a column label set of the CPM
    Vandermonde grid: for every row gap pattern (a, b) and ordered distinct
    labels (x, y, z), N must not divide a*x + b*y - (a+b)*z.

    Returns None when the set is valid, else a violating
    ((a, b), (x, y, z)) witness.
    """
    labels = list(labels)
    for (a, b) in _row_gap_patterns(row_count):
        for x, y, z in _ordered_triples(labels):
            if (a * x + b * y - (a + b) * z) % n == 0:
                return ((a, b), (x, y, z))
    return None


def _ordered_triples(labels):
    for i, x in enumerate(labels):
        for j, y in enumerate(labels):
            if j == i:
                continue
            for k, z in enumerate(labels):
                if k != i and k != j:
                    yield (x, y, z)


def select_columns_girth8(n: int, s: int,
                          candidates: Optional[Sequence[int]] = None,
                          seed: int = 0, budget: int = 200000,
                          row_count: int = 3) -> tuple[int, ...]:
    """Find (or validate) a size-s column label set whose restricted CPM
    Vandermonde matrix has no 6-cycles.

    With `candidates` given, validates that exact set and returns it.  The
    searcher is seeded greedy with backtracking; the validator is the ground
    truth."""
    if s < 2 or s > n:
        raise ConstructionError(f"set size must be in [2, {n}]")
    if candidates is not None:
        viol = check_girth8_columns(list(candidates), n, row_count)
        if viol is not None:
            raise NoSetFoundError(
                f"candidate set violates the condition at rows/labels {viol}")
        return tuple(candidates)
    pats = _row_gap_patterns(row_count)
    rng = random.Random(seed)
    pool = list(range(n))
    rng.shuffle(pool)
    visits = 0

    def extend_ok(cur: list[int], c: int) -> bool:
        # every ordered distinct triple touching c must satisfy the condition
        for (a, b) in pats:
            ab = a + b
            for x in cur:
                for y in cur:
                    if y == x:
                        continue
                    if (a * x + b * y - ab * c) % n == 0:
                        return False
                    if (a * x + b * c - ab * y) % n == 0:
                        return False
                    if (a * c + b * x - ab * y) % n == 0:
                        return False
        return True

    def dfs(cur: list[int], start: int) -> Optional[list[int]]:
        nonlocal visits
        if len(cur) == s:
            return cur
        for idx in range(start, len(pool)):
            visits += 1
            if visits > budget:
                raise NoSetFoundError(
                    f"no size-{s} set found within budget (best {len(cur)})")
            c = pool[idx]
            if len(cur) < 2 or extend_ok(cur, c):
                res = dfs(cur + [c], idx + 1)
                if res is not None:
                    return res
        return None

    res = dfs([], 0)
    if res is None:
        raise NoSetFoundError(f"no size-{s} set found within budget")
    return tuple(res)


# ----------------------------------------------------------------------------
# seeded search for Moore polynomial sets
# ----------------------------------------------------------------------------

def search_moore_polys(field: Field, n: int, m: int, r: int, t: int = 2,
                       seed: int = 0, budget: int = 100000,
                       require_girth: bool = True) -> list[RingPoly]:
    """Rejection-sample weight-t supports until m mutually compatible
    polynomials are found (deterministic for a fixed seed).

    Compatibility means the Moore gcd criterion on every r-subset drawn from
    the accepted set plus, unless `require_girth` is off, the difference-set
    4-cycle conditions against every accepted polynomial and row pair."""
    if t % 2 or t < 2:
        raise OddWeightError(f"support weight must be even >= 2, got {t}")
    if t > n:
        raise ConstructionError("weight exceeds N")
    ctx = RingContext(field, n)
    rng = random.Random(seed)
    found: list[tuple[int, ...]] = []
    found_polys: list[RingPoly] = []
    q = field.order
    for _ in range(budget):
        if len(found) == m:
            break
        cand = tuple(sorted(rng.sample(range(n), t)))
        if cand in found:
            continue
        if require_girth and not delta_set(cand, n).is_set:
            continue
        poly = ctx.from_support(cand)
        if require_girth:
            bad = False
            for other in found_polys:
                if r == 1:
                    ok = vfy.pair_four_cycle_free(poly, other)
                    which = None if ok else "pair"
                else:
                    ok = True
                    for ka, kb in combinations(range(r), 2):
                        ok, which = vfy.quad_four_cycle_free(
                            poly ** (q ** ka), other ** (q ** ka),
                            poly ** (q ** kb), other ** (q ** kb))
                        if not ok:
                            break
                if not ok:
                    bad = True
                    break
            if bad:
                continue
        if len(found) >= r - 1:
            ok = True
            for rest in combinations(range(len(found)), r - 1):
                subset = [found_polys[i] for i in rest] + [poly]
                if not vfy.moore_mds_condition(subset):
                    ok = False
                    break
            if not ok:
                continue
        found.append(cand)
        found_polys.append(poly)
    if len(found) < m:
        raise BudgetExhaustedError(len(found), m)
    return found_polys


# ----------------------------------------------------------------------------
# descriptors
# ----------------------------------------------------------------------------

def load_descriptor(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        d = yaml.safe_load(fh)
    if not isinstance(d, dict) or "family" not in d:
        raise ConstructionError("descriptor must be a mapping with a family tag")
    return d


def write_descriptor(d: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(d, fh, sort_keys=False)


def descriptor_for(code: BuiltCode) -> dict:
    spec = code.spec
    d = {"family": spec.family, "field": spec.field.to_dict(),
         "N": spec.block_size}
    if spec.family == FAMILY_PUCPM:
        d["J"] = spec.params["J"]
        if "columns" in spec.params:
            d["columns"] = spec.params["columns"]
        if spec.puncture != 1:
            d["tau"] = spec.puncture
    elif spec.family == FAMILY_CSM:
        d["r"] = spec.block_rows
        d["shifts"] = spec.params["shifts"]
        d["scales"] = spec.params["scales"]
    else:
        d["r"] = spec.block_rows
        d["polys"] = spec.params["polys"]
    return d


def build_from_descriptor(d: dict) -> BuiltCode:
    family = d["family"]
    field = Field.from_dict(d["field"]) if "field" in d else Field(2, 1)
    n = int(d["N"])
    if family == FAMILY_PUCPM:
        return build_pucpm_vandermonde(
            field, n, int(d["J"]), columns=d.get("columns"),
            tau=int(d.get("tau", 1)))
    if family == FAMILY_CSM:
        return build_csm_vandermonde(
            field, n, int(d["r"]),
            [int(x) for x in d["shifts"]], [int(x) for x in d["scales"]])
    if family == FAMILY_MOORE:
        ctx = RingContext(field, n)
        polys = [ctx.parse(str(p)) for p in d["polys"]]
        return build_moore_pucm(
            field, n, int(d["r"]), polys,
            require_mds=bool(d.get("require_mds", True)),
            require_girth=bool(d.get("require_girth", True)))
    raise ConstructionError(f"unknown family {family!r}")


def meta_dict(code: BuiltCode) -> dict:
    """JSON-ready metadata sidecar for a built code."""
    spec = code.spec
    cert = dict(spec.certificates)
    mds = cert.get("mds")
    if mds and mds.get("ok"):
        basis = f"{spec.family}|{spec.block_size}|{spec.block_rows}|{mds['basis']}"
        cert = dict(cert)
        cert["mds"] = dict(mds, certificate_hash=hashlib.sha256(
            basis.encode()).hexdigest()[:16])
    return {
        "family": spec.family,
        "field": spec.field.to_dict(),
        "N": spec.block_size,
        "block_rows": spec.block_rows,
        "block_cols": spec.block_cols,
        "tau": spec.puncture,
        "subpacketization": spec.subpacketization,
        "n": spec.length,
        "k": spec.dimension,
        "rate": round(spec.rate, 6),
        "d_array": spec.d_array,
        "params": spec.params,
        "certificates": cert,
    }
