"""Block MDS LDPC codes from punctured circulant matrices.

Construction of three code families (punctured CPM Vandermonde, scaled CPM
Vandermonde, Moore-form punctured circulants), independent certification of
their girth and MDS-array properties, a binary sum-product decoder over
BPSK/AWGN, an erasure decoder for whole-node losses, and a seeded Monte-Carlo
evaluation harness.
"""

from .fields import Field, FieldElement, GF2, GF128
from .ring import RingContext, RingPoly, delta_set, gcd_with_modulus, \
    index_set, is_modular_golomb, is_primitive_root, set_diff, set_sum
from .gfmatrix import BlockPlan, CirculantSpec, GFMatrix, assemble, cpm, \
    expand, read_alist, ring_grid_det, write_alist
from .construct import BuiltCode, CodeSpec, build_csm_vandermonde, \
    build_moore_pucm, build_pucpm_vandermonde, build_from_descriptor, \
    check_girth8_columns, cpm_vandermonde_plan, search_moore_polys, \
    select_columns_girth8
from .verify import GirthReport, MdsReport, TannerGraph, circulant_girth, \
    fossorier_check, girth, has_four_cycles, mds_exhaustive, mds_sampled, \
    moore_det_product, moore_grid, moore_mds_condition, pair_four_cycle_free, \
    quad_four_cycle_free, schur_det, singleton_check
from .codec import DecodeOutcome, EncoderState, SumProductDecoder, \
    decode_spa, encode, erase_recover, systematize
from .sim import SimConfig, SimPoint, SimResult, read_csv, run, write_csv

__version__ = "0.1.0"
