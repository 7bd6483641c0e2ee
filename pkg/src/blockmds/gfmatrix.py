"""Dense matrices over F_q with a bit-packed GF(2) fast path.

GF(2) matrices store each row as a Python int bitmask (bit j = column j) and
eliminate with word-wise XOR; general fields store label arrays and eliminate
through the field's lookup tables.  On top of the raw matrices sit the
circulant building blocks: a :class:`CirculantSpec` describes one block as a
ring element a(x), an optional nonzero scale, and a puncture depth tau, and
expands to scale * a(P_N) with the last tau rows and columns removed.  A
:class:`BlockPlan` is an r x m grid of such specs sharing one ring context and
puncture depth; :func:`assemble` expands it to the full parity-check matrix.

Indexing is 0-based throughout: P_N has its one in row s at column
(s + 1) mod N.

alist interchange: line 1 is ``n m`` (columns, rows) for binary matrices and
``n m q`` for the non-binary extension; then the max column/row degrees, the
per-column and per-row degree lists, and 1-based index lists per column then
per row, zero-padded to the max degree.  Non-binary files follow each index
line with a parallel line of value labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fields import Field
from .ring import RingContext, RingPoly


class MatrixError(ValueError):
    pass


class ShiftOutOfRangeError(MatrixError):
    pass


class NonSquareError(MatrixError):
    pass


class DimensionMismatchError(MatrixError):
    pass


class NoSolutionError(MatrixError):
    pass


class InconsistentBlocksError(MatrixError):
    pass


def _label_dtype(order: int):
    return np.uint8 if order <= 256 else np.uint16


class GFMatrix:
    """Immutable dense matrix over a field; rank/solve work on copies."""

    def __init__(self, field: Field, nrows: int, ncols: int, *,
                 bits: list[int] | None = None, arr: np.ndarray | None = None):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        if field.order == 2:
            self._bits = bits if bits is not None else [0] * nrows
            self._arr = None
        else:
            if arr is None:
                arr = np.zeros((nrows, ncols), dtype=_label_dtype(field.order))
            self._bits = None
            self._arr = arr

    # -- constructors ----------------------------------------------------------

    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> "GFMatrix":
        return cls(field, nrows, ncols)

    @classmethod
    def identity(cls, field: Field, n: int) -> "GFMatrix":
        if field.order == 2:
            return cls(field, n, n, bits=[1 << i for i in range(n)])
        arr = np.zeros((n, n), dtype=_label_dtype(field.order))
        np.fill_diagonal(arr, 1)
        return cls(field, n, n, arr=arr)

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence[int]]) -> "GFMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        if any(len(r) != ncols for r in rows):
            raise DimensionMismatchError("ragged rows")
        if field.order == 2:
            bits = []
            for r in rows:
                v = 0
                for j, c in enumerate(r):
                    if c % 2:
                        v |= 1 << j
                bits.append(v)
            return cls(field, nrows, ncols, bits=bits)
        arr = np.array(rows, dtype=_label_dtype(field.order)).reshape(nrows, ncols)
        return cls(field, nrows, ncols, arr=arr)

    # -- access ----------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def is_binary(self) -> bool:
        return self.field.order == 2

    def entry(self, i: int, j: int) -> int:
        if self._bits is not None:
            return (self._bits[i] >> j) & 1
        return int(self._arr[i, j])

    def row_support(self, i: int) -> list[int]:
        if self._bits is not None:
            out, x = [], self._bits[i]
            while x:
                b = x & -x
                out.append(b.bit_length() - 1)
                x ^= b
            return out
        return [int(j) for j in np.nonzero(self._arr[i])[0]]

    def row_bits(self, i: int) -> int:
        """Support of row i as a bitmask (any field)."""
        if self._bits is not None:
            return self._bits[i]
        v = 0
        for j in np.nonzero(self._arr[i])[0]:
            v |= 1 << int(j)
        return v

    @property
    def nnz(self) -> int:
        if self._bits is not None:
            return sum(r.bit_count() for r in self._bits)
        return int(np.count_nonzero(self._arr))

    def to_array(self) -> np.ndarray:
        if self._bits is not None:
            out = np.zeros((self.nrows, self.ncols), dtype=np.uint8)
            for i, r in enumerate(self._bits):
                for j in self.row_support(i):
                    out[i, j] = 1
            return out
        return self._arr.copy()

    def copy(self) -> "GFMatrix":
        if self._bits is not None:
            return GFMatrix(self.field, self.nrows, self.ncols, bits=list(self._bits))
        return GFMatrix(self.field, self.nrows, self.ncols, arr=self._arr.copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, GFMatrix) or self.field != other.field:
            return False
        if self.shape != other.shape:
            return False
        if self._bits is not None:
            return self._bits == other._bits
        return bool(np.array_equal(self._arr, other._arr))

    def __repr__(self) -> str:
        return f"GFMatrix({self.nrows}x{self.ncols} over GF({self.field.order}))"

    # -- structure -------------------------------------------------------------

    def transpose(self) -> "GFMatrix":
        if self._bits is not None:
            cols = [0] * self.ncols
            for i, r in enumerate(self._bits):
                x = r
                while x:
                    b = x & -x
                    cols[b.bit_length() - 1] |= 1 << i
                    x ^= b
            return GFMatrix(self.field, self.ncols, self.nrows, bits=cols)
        return GFMatrix(self.field, self.ncols, self.nrows,
                        arr=np.ascontiguousarray(self._arr.T))

    def col_slice(self, lo: int, hi: int) -> "GFMatrix":
        if not 0 <= lo <= hi <= self.ncols:
            raise DimensionMismatchError("column slice out of range")
        w = hi - lo
        if self._bits is not None:
            mask = (1 << w) - 1
            return GFMatrix(self.field, self.nrows, w,
                            bits=[(r >> lo) & mask for r in self._bits])
        return GFMatrix(self.field, self.nrows, w,
                        arr=np.ascontiguousarray(self._arr[:, lo:hi]))

    @classmethod
    def hstack(cls, mats: Sequence["GFMatrix"]) -> "GFMatrix":
        f = mats[0].field
        nrows = mats[0].nrows
        if any(m.field != f or m.nrows != nrows for m in mats):
            raise DimensionMismatchError("hstack needs equal fields and row counts")
        if f.order == 2:
            bits = [0] * nrows
            off = 0
            for m in mats:
                for i in range(nrows):
                    bits[i] |= m._bits[i] << off
                off += m.ncols
            return cls(f, nrows, off, bits=bits)
        arr = np.concatenate([m._arr for m in mats], axis=1)
        return cls(f, nrows, arr.shape[1], arr=arr)

    @classmethod
    def vstack(cls, mats: Sequence["GFMatrix"]) -> "GFMatrix":
        f = mats[0].field
        ncols = mats[0].ncols
        if any(m.field != f or m.ncols != ncols for m in mats):
            raise DimensionMismatchError("vstack needs equal fields and column counts")
        if f.order == 2:
            bits = []
            for m in mats:
                bits.extend(m._bits)
            return cls(f, len(bits), ncols, bits=bits)
        arr = np.concatenate([m._arr for m in mats], axis=0)
        return cls(f, arr.shape[0], ncols, arr=arr)

    # -- arithmetic ------------------------------------------------------------

    def add(self, other: "GFMatrix") -> "GFMatrix":
        if self.field != other.field or self.shape != other.shape:
            raise DimensionMismatchError("shape/field mismatch in add")
        if self._bits is not None:
            return GFMatrix(self.field, self.nrows, self.ncols,
                            bits=[a ^ b for a, b in zip(self._bits, other._bits)])
        return GFMatrix(self.field, self.nrows, self.ncols,
                        arr=self.field.add_labels(self._arr, other._arr))

    def matmul(self, other: "GFMatrix") -> "GFMatrix":
        if self.field != other.field or self.ncols != other.nrows:
            raise DimensionMismatchError("shape/field mismatch in matmul")
        if self._bits is not None:
            rows = []
            for i in range(self.nrows):
                v = 0
                for j in self.row_support(i):
                    v ^= other._bits[j]
                rows.append(v)
            return GFMatrix(self.field, self.nrows, other.ncols, bits=rows)
        mul = self.field.mul_table
        out = np.zeros((self.nrows, other.ncols), dtype=self._arr.dtype)
        for i in range(self.nrows):
            acc = out[i]
            row = self._arr[i]
            for j in np.nonzero(row)[0]:
                acc = self.field.add_labels(acc, mul[row[j], other._arr[j]])
            out[i] = acc
        return GFMatrix(self.field, self.nrows, other.ncols, arr=out)

    def matvec(self, vec: Sequence[int]) -> list[int]:
        if len(vec) != self.ncols:
            raise DimensionMismatchError("vector length mismatch")
        if self._bits is not None:
            v = 0
            for j, c in enumerate(vec):
                if c % 2:
                    v |= 1 << j
            return [(self._bits[i] & v).bit_count() & 1 for i in range(self.nrows)]
        f = self.field
        out = []
        for i in range(self.nrows):
            acc = 0
            for j in np.nonzero(self._arr[i])[0]:
                acc = f.label_add(acc, f.label_mul(int(self._arr[i, j]), vec[j]))
            out.append(acc)
        return out

    def __pow__(self, e: int) -> "GFMatrix":
        if self.nrows != self.ncols:
            raise NonSquareError("powers need a square matrix")
        r = GFMatrix.identity(self.field, self.nrows)
        base = self
        while e:
            if e & 1:
                r = r.matmul(base)
            base = base.matmul(base)
            e >>= 1
        return r

    # -- elimination -----------------------------------------------------------

    def _rref_bits(self, rows: list[int]) -> tuple[list[int], list[int]]:
        work = list(rows)
        pivots: list[int] = []
        r = 0
        nwork = len(work)
        for col in range(self.ncols):
            if r == nwork:
                break
            bit = 1 << col
            piv = None
            for i in range(r, nwork):
                if work[i] & bit:
                    piv = i
                    break
            if piv is None:
                continue
            work[r], work[piv] = work[piv], work[r]
            wr = work[r]
            for i in range(nwork):
                if i != r and (work[i] & bit):
                    work[i] ^= wr
            pivots.append(col)
            r += 1
        return work, pivots

    def _rref_arr(self, arr: np.ndarray) -> tuple[np.ndarray, list[int], int]:
        """Returns (rref array, pivot columns, row-swap count)."""
        f = self.field
        a = arr.copy()
        mul = f.mul_table
        inv = f.inv_table
        pivots: list[int] = []
        swaps = 0
        r = 0
        nrows = a.shape[0]
        xor_add = f.characteristic == 2
        for col in range(a.shape[1]):
            if r == nrows:
                break
            nz = np.nonzero(a[r:, col])[0]
            if nz.size == 0:
                continue
            p = r + int(nz[0])
            if p != r:
                a[[r, p]] = a[[p, r]]
                swaps += 1
            if a[r, col] != 1:
                a[r] = mul[inv[a[r, col]], a[r]]
            colvals = a[:, col].copy()
            colvals[r] = 0
            rows = np.nonzero(colvals)[0]
            if rows.size:
                upd = mul[colvals[rows][:, None], a[r][None, :]]
                if xor_add:
                    a[rows] ^= upd
                else:
                    a[rows] = f.add_labels(a[rows], f.neg_labels(upd))
            pivots.append(col)
            r += 1
        return a, pivots, swaps

    def rref(self) -> tuple["GFMatrix", list[int]]:
        if self._bits is not None:
            work, pivots = self._rref_bits(self._bits)
            return GFMatrix(self.field, self.nrows, self.ncols, bits=work), pivots
        a, pivots, _ = self._rref_arr(self._arr)
        return GFMatrix(self.field, self.nrows, self.ncols, arr=a), pivots

    def rank(self) -> int:
        if self._bits is not None:
            return len(self._rref_bits(self._bits)[1])
        return len(self._rref_arr(self._arr)[1])

    def det(self) -> int:
        """Determinant as a field label; NonSquareError otherwise."""
        if self.nrows != self.ncols:
            raise NonSquareError("determinant of a non-square matrix")
        f = self.field
        if self._bits is not None:
            return 1 if len(self._rref_bits(self._bits)[1]) == self.nrows else 0
        # track pivot product on an unnormalized elimination
        a = self._arr.copy()
        mul, inv = f.mul_table, f.inv_table
        detv = 1
        swaps = 0
        xor_add = f.characteristic == 2
        n = self.nrows
        for col in range(n):
            nz = np.nonzero(a[col:, col])[0]
            if nz.size == 0:
                return 0
            p = col + int(nz[0])
            if p != col:
                a[[col, p]] = a[[p, col]]
                swaps += 1
            detv = f.label_mul(detv, int(a[col, col]))
            ivl = inv[a[col, col]]
            a[col] = mul[ivl, a[col]]
            below = a[col + 1:, col].copy()
            rows = np.nonzero(below)[0]
            if rows.size:
                upd = mul[below[rows][:, None], a[col][None, :]]
                if xor_add:
                    a[col + 1 + rows] ^= upd
                else:
                    a[col + 1 + rows] = f.add_labels(a[col + 1 + rows],
                                                     f.neg_labels(upd))
        if f.characteristic != 2 and swaps % 2:
            detv = f.label_neg(detv)
        return detv

    def solve(self, b: Sequence[int]) -> list[int]:
        """One solution of M x = b (free variables zero); NoSolutionError if
        inconsistent.  The returned vector is re-checked against M."""
        if len(b) != self.nrows:
            raise DimensionMismatchError("rhs length mismatch")
        n = self.ncols
        if self._bits is not None:
            aug = [r | ((1 if b[i] % 2 else 0) << n) for i, r in enumerate(self._bits)]
            work, pivots = GFMatrix(self.field, self.nrows, n + 1, bits=aug)._rref_bits(aug)
            x = [0] * n
            for r, col in enumerate(pivots):
                if col == n:
                    raise NoSolutionError("inconsistent system")
                x[col] = (work[r] >> n) & 1
            check = self.matvec(x)
            if any(ci != bi % 2 for ci, bi in zip(check, b)):
                raise NoSolutionError("solution verification failed")
            return x
        aug = np.concatenate(
            [self._arr, np.array(b, dtype=self._arr.dtype)[:, None]], axis=1)
        a, pivots, _ = GFMatrix(self.field, self.nrows, n + 1, arr=aug)._rref_arr(aug)
        x = [0] * n
        for r, col in enumerate(pivots):
            if col == n:
                raise NoSolutionError("inconsistent system")
            x[col] = int(a[r, n])
        check = self.matvec(x)
        if any(ci != bi for ci, bi in zip(check, b)):
            raise NoSolutionError("solution verification failed")
        return x


# ----------------------------------------------------------------------------
# circulant blocks
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class CirculantSpec:
    """One block: scale * a(P_N), punctured by tau rows/columns at the end."""

    poly: RingPoly
    scale: int = 1
    puncture: int = 0

    def __post_init__(self):
        n = self.poly.ctx.size
        if self.scale == 0 or not 0 <= self.scale < self.poly.ctx.field.order:
            raise MatrixError("scale must be a nonzero field label")
        if not 0 <= self.puncture < n:
            raise MatrixError(f"puncture depth must be in [0, {n})")


def cpm(ctx: RingContext, shift: int) -> GFMatrix:
    """The circulant permutation matrix P_N^shift."""
    n = ctx.size
    if not 0 <= shift < n:
        raise ShiftOutOfRangeError(f"shift {shift} outside [0, {n})")
    return expand(CirculantSpec(ctx.monomial(shift)))


def expand(spec: CirculantSpec) -> GFMatrix:
    """scale * a(P_N) with the last tau rows and columns removed."""
    ctx = spec.poly.ctx
    field, n, tau = ctx.field, ctx.size, spec.puncture
    size = n - tau
    entries = [(e, field.label_mul(spec.scale, spec.poly.coeffs[e]))
               for e in spec.poly.support]
    if field.order == 2:
        bits = []
        for s in range(size):
            v = 0
            for e, _ in entries:
                c = s + e
                if c >= n:
                    c -= n
                if c < size:
                    v |= 1 << c
            bits.append(v)
        return GFMatrix(field, size, size, bits=bits)
    arr = np.zeros((size, size), dtype=_label_dtype(field.order))
    for s in range(size):
        for e, val in entries:
            c = (s + e) % n
            if c < size:
                arr[s, c] = field.label_add(int(arr[s, c]), val) if arr[s, c] else val
    return GFMatrix(field, size, size, arr=arr)


@dataclass(frozen=True)
class BlockPlan:
    """An r x m grid of circulant specs over one ring context."""

    ctx: RingContext
    grid: tuple[tuple[CirculantSpec, ...], ...]

    def __post_init__(self):
        if not self.grid or not self.grid[0]:
            raise InconsistentBlocksError("empty plan")
        m = len(self.grid[0])
        tau = self.grid[0][0].puncture
        for row in self.grid:
            if len(row) != m:
                raise InconsistentBlocksError("ragged block grid")
            for spec in row:
                if spec.poly.ctx != self.ctx:
                    raise InconsistentBlocksError("block from a different ring context")
                if spec.puncture != tau:
                    raise InconsistentBlocksError("puncture depth must be uniform")

    @classmethod
    def make(cls, ctx: RingContext,
             grid: Sequence[Sequence[CirculantSpec]]) -> "BlockPlan":
        return cls(ctx, tuple(tuple(row) for row in grid))

    @property
    def block_rows(self) -> int:
        return len(self.grid)

    @property
    def block_cols(self) -> int:
        return len(self.grid[0])

    @property
    def puncture(self) -> int:
        return self.grid[0][0].puncture

    @property
    def block_size(self) -> int:
        return self.ctx.size - self.puncture

    def select_columns(self, cols: Sequence[int]) -> "BlockPlan":
        return BlockPlan(self.ctx, tuple(
            tuple(row[j] for j in cols) for row in self.grid))


def assemble(plan: BlockPlan) -> GFMatrix:
    """Expand a plan to its r(N-tau) x m(N-tau) parity-check matrix."""
    field = plan.ctx.field
    size = plan.block_size
    if field.order == 2:
        rows: list[int] = []
        for blockrow in plan.grid:
            blocks = [expand(s)._bits for s in blockrow]
            for s in range(size):
                v = 0
                for j, b in enumerate(blocks):
                    v |= b[s] << (j * size)
                rows.append(v)
        return GFMatrix(field, len(rows), plan.block_cols * size, bits=rows)
    rows_np = []
    for blockrow in plan.grid:
        rows_np.append(np.concatenate([expand(s)._arr for s in blockrow], axis=1))
    arr = np.concatenate(rows_np, axis=0)
    return GFMatrix(field, arr.shape[0], arr.shape[1], arr=arr)


def ring_grid_det(grid: Sequence[Sequence[RingPoly]]) -> RingPoly:
    """Determinant of a square grid of commuting circulants, computed by
    cofactor expansion in the ring (valid despite zero divisors)."""
    r = len(grid)
    if any(len(row) != r for row in grid):
        raise NonSquareError("ring determinant needs a square grid")
    ctx = grid[0][0].ctx
    if r == 1:
        return grid[0][0]

    def det_rec(rows: tuple[int, ...], cols: tuple[int, ...]) -> RingPoly:
        if len(rows) == 1:
            return grid[rows[0]][cols[0]]
        acc = ctx.zero
        top = rows[0]
        rest = rows[1:]
        for k, c in enumerate(cols):
            sub = det_rec(rest, cols[:k] + cols[k + 1:])
            term = grid[top][c] * sub
            if k % 2:
                acc = acc - term
            else:
                acc = acc + term
        return acc

    return det_rec(tuple(range(r)), tuple(range(r)))


# ----------------------------------------------------------------------------
# alist interchange
# ----------------------------------------------------------------------------

def write_alist(m: GFMatrix, path: str) -> None:
    cols = [[] for _ in range(m.ncols)]
    rows = []
    for i in range(m.nrows):
        sup = m.row_support(i)
        rows.append(sup)
        for j in sup:
            cols[j].append(i)
    max_col = max((len(c) for c in cols), default=0)
    max_row = max((len(r) for r in rows), default=0)
    binary = m.is_binary
    lines = []
    if binary:
        lines.append(f"{m.ncols} {m.nrows}")
    else:
        lines.append(f"{m.ncols} {m.nrows} {m.field.order}")
    lines.append(f"{max_col} {max_row}")
    lines.append(" ".join(str(len(c)) for c in cols))
    lines.append(" ".join(str(len(r)) for r in rows))

    def padded(idx: list[int], width: int) -> str:
        out = [str(i + 1) for i in idx] + ["0"] * (width - len(idx))
        return " ".join(out)

    for j in range(m.ncols):
        lines.append(padded(cols[j], max_col))
        if not binary:
            vals = [str(m.entry(i, j)) for i in cols[j]] + ["0"] * (max_col - len(cols[j]))
            lines.append(" ".join(vals))
    for i in range(m.nrows):
        lines.append(padded(rows[i], max_row))
        if not binary:
            vals = [str(m.entry(i, j)) for j in rows[i]] + ["0"] * (max_row - len(rows[i]))
            lines.append(" ".join(vals))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_alist(path: str, field: Field | None = None) -> GFMatrix:
    with open(path, "r", encoding="ascii") as fh:
        toks = [line.split() for line in fh if line.strip()]
    header = toks[0]
    ncols, nrows = int(header[0]), int(header[1])
    nonbinary = len(header) >= 3
    if nonbinary:
        order = int(header[2])
        if field is None:
            raise MatrixError(
                f"alist declares GF({order}) values; pass the field to read it")
        if field.order != order:
            raise MatrixError(f"field order {field.order} != alist order {order}")
    else:
        if field is None:
            field = Field(2, 1)
        if field.order != 2:
            raise MatrixError("binary alist read with a non-binary field")
    col_deg = [int(x) for x in toks[2]]
    if len(col_deg) != ncols:
        raise MatrixError("column degree list length mismatch")
    row_deg = [int(x) for x in toks[3]]
    if len(row_deg) != nrows:
        raise MatrixError("row degree list length mismatch")
    pos = 4
    out = GFMatrix.zeros(field, nrows, ncols)
    if field.order == 2:
        bits = [0] * nrows
        for j in range(ncols):
            for tok in toks[pos][:col_deg[j]]:
                i = int(tok) - 1
                bits[i] |= 1 << j
            pos += 1
        return GFMatrix(field, nrows, ncols, bits=bits)
    arr = np.zeros((nrows, ncols), dtype=_label_dtype(field.order))
    for j in range(ncols):
        idx = [int(t) - 1 for t in toks[pos][:col_deg[j]]]
        vals = [int(t) for t in toks[pos + 1][:col_deg[j]]]
        for i, v in zip(idx, vals):
            arr[i, j] = v
        pos += 2
    return GFMatrix(field, nrows, ncols, arr=arr)
