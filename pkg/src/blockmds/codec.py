"""Turning a parity-check matrix into a working code.

* :func:`systematize` finds an information set by Gaussian elimination with
  column pivoting and produces a generator whose rows live in the kernel of H
  (handles rank-deficient H).
* :class:`SumProductDecoder` is a log-domain flooding sum-product decoder for
  binary matrices (tanh rule, LLR clamp at +-30, ties decode to bit 0).  The
  batch path decodes many frames at once with identical per-frame results, so
  throughput knobs cannot change outcomes.
* :func:`erase_recover` solves whole-node erasures of a block plan through
  the parity equations; exactness for <= r erased nodes is what the MDS
  certificate guarantees.

LLR convention: bit 0 maps to +1 on the channel, so positive LLR means bit 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .gfmatrix import BlockPlan, GFMatrix, assemble

LLR_CLAMP = 30.0
_TINY = 1e-300
_EPS = 1e-12


class CodecError(ValueError):
    pass


class ZeroCodeError(CodecError):
    pass


class LengthMismatchError(CodecError):
    pass


class NonBinaryMatrixError(CodecError):
    pass


class TooManyErasuresError(CodecError):
    pass


class NotCertifiedError(CodecError):
    pass


# ----------------------------------------------------------------------------
# systematic encoder
# ----------------------------------------------------------------------------

@dataclass
class EncoderState:
    """Generator rows plus the information-set bookkeeping.

    G is stored as bit rows (binary) or a label array; row i is the codeword
    carrying message symbol i at info_positions[i].
    """

    field: object
    n: int
    k: int
    info_positions: tuple[int, ...]
    pivot_positions: tuple[int, ...]
    _g_bits: Optional[list[int]] = None
    _g_arr: Optional[np.ndarray] = None


def systematize(h: GFMatrix) -> EncoderState:
    """Build an encoder from H; k = n - rank(H).  ZeroCodeError when k = 0."""
    n = h.ncols
    field = h.field
    rref, pivots = h.rref()
    rank = len(pivots)
    k = n - rank
    if k == 0:
        raise ZeroCodeError("parity-check matrix has full column rank")
    pivot_set = set(pivots)
    free_cols = [j for j in range(n) if j not in pivot_set]
    if h.is_binary:
        g_bits = []
        for f in free_cols:
            row = 1 << f
            for rr, pc in enumerate(pivots):
                if (rref._bits[rr] >> f) & 1:
                    row |= 1 << pc
            g_bits.append(row)
        st = EncoderState(field, n, k, tuple(free_cols), tuple(pivots),
                          _g_bits=g_bits)
    else:
        arr = rref._arr
        g = np.zeros((k, n), dtype=arr.dtype)
        for gi, f in enumerate(free_cols):
            g[gi, f] = 1
            for rr, pc in enumerate(pivots):
                if arr[rr, f]:
                    g[gi, pc] = field.label_neg(int(arr[rr, f]))
        st = EncoderState(field, n, k, tuple(free_cols), tuple(pivots),
                          _g_arr=g)
    return st


def encode(st: EncoderState, msg: Sequence[int]) -> np.ndarray:
    """Codeword with the message verbatim on the systematic positions."""
    if len(msg) != st.k:
        raise LengthMismatchError(f"message length {len(msg)} != k {st.k}")
    if st._g_bits is not None:
        acc = 0
        for i, bit in enumerate(msg):
            if bit % 2:
                acc ^= st._g_bits[i]
        out = np.zeros(st.n, dtype=np.uint8)
        while acc:
            b = acc & -acc
            out[b.bit_length() - 1] = 1
            acc ^= b
        return out
    field = st.field
    out = np.zeros(st.n, dtype=st._g_arr.dtype)
    for i, sym in enumerate(msg):
        if sym:
            out = field.add_labels(out, field.mul_table[sym, st._g_arr[i]])
    return out


# ----------------------------------------------------------------------------
# sum-product decoder
# ----------------------------------------------------------------------------

@dataclass
class DecodeOutcome:
    bits: np.ndarray
    converged: bool
    iterations: int
    syndrome_zero: bool


class SumProductDecoder:
    """Flooding-schedule log-domain sum-product decoder for a binary H.

    Edge arrays are laid out check-sorted; a fixed permutation reorders them
    variable-sorted for the variable-side sums, so every operation is a
    deterministic elementwise/segment pass and frames in a batch never
    interact.
    """

    def __init__(self, h: GFMatrix):
        if not h.is_binary:
            raise NonBinaryMatrixError("soft decoding is binary-only")
        self.n_checks = h.nrows
        self.n_vars = h.ncols
        echk, evar = [], []
        for i in range(h.nrows):
            for j in h.row_support(i):
                echk.append(i)
                evar.append(j)
        if not echk:
            raise NonBinaryMatrixError("empty parity-check matrix")
        self.echk = np.asarray(echk, dtype=np.int32)
        self.evar = np.asarray(evar, dtype=np.int32)
        self.n_edges = len(echk)
        var_deg = np.bincount(self.evar, minlength=self.n_vars)
        if (var_deg == 0).any():
            raise NonBinaryMatrixError("zero column in parity-check matrix")
        self.chk_starts = np.searchsorted(self.echk, np.arange(self.n_checks))
        self.vs_order = np.lexsort((self.echk, self.evar))
        self.var_starts = np.searchsorted(self.evar[self.vs_order],
                                          np.arange(self.n_vars))

    def _syndrome_ok(self, bits: np.ndarray) -> np.ndarray:
        s = np.add.reduceat(bits[:, self.evar].astype(np.int32),
                            self.chk_starts, axis=1) & 1
        return ~s.any(axis=1)

    def decode_batch(self, llrs: np.ndarray, max_iter: int = 50
                     ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Decode a (B, n) LLR batch; returns (bits, iterations, converged)."""
        llrs = np.atleast_2d(np.asarray(llrs, dtype=np.float64))
        B = llrs.shape[0]
        if llrs.shape[1] != self.n_vars:
            raise LengthMismatchError(
                f"llr length {llrs.shape[1]} != n {self.n_vars}")
        bits = (llrs < 0).astype(np.uint8)
        iters = np.zeros(B, dtype=np.int32)
        done = self._syndrome_ok(bits)
        active = np.nonzero(~done)[0]
        if active.size == 0:
            return bits, iters, done
        L = np.clip(llrs[active], -LLR_CLAMP, LLR_CLAMP)
        Lq = L[:, self.evar]
        for it in range(1, max_iter + 1):
            t = np.tanh(Lq * 0.5)
            sign = np.where(t < 0, -1.0, 1.0)
            logm = np.log(np.abs(t) + _TINY)
            row_logm = np.add.reduceat(logm, self.chk_starts, axis=1)
            row_neg = np.add.reduceat((t < 0).astype(np.int8),
                                      self.chk_starts, axis=1) & 1
            row_sign = 1.0 - 2.0 * row_neg
            mag = np.exp(row_logm[:, self.echk] - logm)
            Lr = 2.0 * np.arctanh(np.clip(mag, 0.0, 1.0 - _EPS)) \
                * row_sign[:, self.echk] * sign
            total = L + np.add.reduceat(Lr[:, self.vs_order],
                                        self.var_starts, axis=1)
            cur_bits = (total < 0).astype(np.uint8)
            ok = self._syndrome_ok(cur_bits)
            conv = np.nonzero(ok)[0]
            if conv.size:
                g = active[conv]
                bits[g] = cur_bits[conv]
                iters[g] = it
                done[g] = True
                keep = np.nonzero(~ok)[0]
                active = active[keep]
                if active.size == 0:
                    return bits, iters, done
                L = L[keep]
                total = total[keep]
                Lr = Lr[keep]
                cur_bits = cur_bits[keep]
            Lq = np.clip(total[:, self.evar] - Lr, -LLR_CLAMP, LLR_CLAMP)
            if it == max_iter:
                bits[active] = cur_bits
                iters[active] = max_iter
        return bits, iters, done

    def decode(self, llr: Sequence[float], max_iter: int = 50) -> DecodeOutcome:
        bits, iters, done = self.decode_batch(
            np.asarray(llr, dtype=np.float64)[None, :], max_iter)
        return DecodeOutcome(bits[0], bool(done[0]), int(iters[0]), bool(done[0]))


def decode_spa(h: GFMatrix, llr: Sequence[float],
               max_iter: int = 50) -> DecodeOutcome:
    """One-shot sum-product decode; builds the edge structure afresh."""
    return SumProductDecoder(h).decode(llr, max_iter)


# ----------------------------------------------------------------------------
# node-erasure recovery
# ----------------------------------------------------------------------------

def erase_recover(plan: BlockPlan, word: Sequence[Optional[int]], *,
                  certified: bool = False) -> list[int]:
    """Recover whole-node (block column) erasures, marked as None symbols.

    Requires the plan's MDS property to have been certified by the caller
    (NotCertifiedError otherwise); at most r = block_rows nodes may be erased
    and erasures must cover whole nodes.
    """
    if not certified:
        raise NotCertifiedError("plan is not certified MDS; recovery is not "
                                "guaranteed — pass certified=True after "
                                "verifying")
    size = plan.block_size
    m = plan.block_cols
    r = plan.block_rows
    if len(word) != m * size:
        raise LengthMismatchError(f"word length {len(word)} != {m * size}")
    erased_nodes = sorted({i // size for i, s in enumerate(word) if s is None})
    for node in erased_nodes:
        seg = word[node * size:(node + 1) * size]
        if any(s is not None for s in seg):
            raise CodecError(f"node {node} is only partially erased")
    if not erased_nodes:
        return [int(s) for s in word]
    if len(erased_nodes) > r:
        raise TooManyErasuresError(
            f"{len(erased_nodes)} erased nodes exceed the guarantee r={r}")
    field = plan.ctx.field
    h = assemble(plan)
    known = [(i, int(s)) for i, s in enumerate(word) if s is not None]
    # syndrome of the known part: sum_j H_j c_j over known positions
    if field.order == 2:
        vec = 0
        for i, s in known:
            if s & 1:
                vec |= 1 << i
        syn = [(h._bits[row] & vec).bit_count() & 1 for row in range(h.nrows)]
        syn = [field.label_neg(s) for s in syn]
    else:
        syn = [0] * h.nrows
        for row in range(h.nrows):
            acc = 0
            for i, s in known:
                e = h.entry(row, i)
                if e and s:
                    acc = field.label_add(acc, field.label_mul(e, s))
            syn[row] = field.label_neg(acc)
    cols = GFMatrix.hstack([h.col_slice(node * size, (node + 1) * size)
                            for node in erased_nodes])
    x = cols.solve(syn)
    out = [int(s) if s is not None else 0 for s in word]
    for pos, node in enumerate(erased_nodes):
        for t in range(size):
            out[node * size + t] = x[pos * size + t]
    return out
