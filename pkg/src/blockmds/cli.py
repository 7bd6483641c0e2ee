"""Command-line front door.

Commands: construct, verify, girth, mds, simulate, search, info.
Inputs are either a YAML construction descriptor or an alist matrix file
(non-binary alists need --field).  Exit codes: 0 success, 1 verification
failure, 2 input error, 3 budget/limit.
"""

from __future__ import annotations

import argparse
import json
import sys
from math import comb

from . import construct as cst
from . import sim as simmod
from . import verify as vfy
from .fields import Field, FieldError
from .gfmatrix import GFMatrix, MatrixError, read_alist, write_alist
from .ring import RingError

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


class CliError(Exception):
    def __init__(self, msg: str, code: int = EXIT_INPUT):
        super().__init__(msg)
        self.code = code


def _parse_field(text: str) -> Field:
    """`p` or `p^m/modulus` with the modulus written like x^7+x+1."""
    text = text.strip()
    if "/" in text:
        head, modtext = text.split("/", 1)
    else:
        head, modtext = text, None
    if "^" in head:
        p_s, m_s = head.split("^", 1)
        p, m = int(p_s), int(m_s)
    else:
        p, m = int(head), 1
    modulus = None
    if modtext is not None:
        coeffs = [0] * (m + 1)
        for term in modtext.replace("-", "+").split("+"):
            term = term.strip()
            if not term:
                continue
            if term == "x":
                coeffs[1] = (coeffs[1] + 1) % p
            elif term.startswith("x^"):
                coeffs[int(term[2:])] = (coeffs[int(term[2:])] + 1) % p
            else:
                coeffs[0] = (coeffs[0] + int(term)) % p
        modulus = coeffs
    return Field(p, m, modulus)


def _load_input(path: str, field_text: str | None):
    """Returns (code_or_None, matrix).  Descriptors build the full code."""
    is_desc = path.endswith((".yaml", ".yml", ".desc"))
    if not is_desc:
        try:
            with open(path, "r", encoding="utf-8", errors="ignore") as fh:
                head = fh.read(256)
            is_desc = "family:" in head
        except OSError as exc:
            raise CliError(f"cannot read {path}: {exc}")
    if is_desc:
        d = cst.load_descriptor(path)
        code = cst.build_from_descriptor(d)
        return code, code.matrix
    field = _parse_field(field_text) if field_text else None
    try:
        mat = read_alist(path, field)
    except (OSError, MatrixError, ValueError) as exc:
        raise CliError(f"cannot load alist {path}: {exc}")
    return None, mat


def _snr_list(text: str) -> tuple[float, ...]:
    if ":" in text:
        a, step, b = (float(x) for x in text.split(":"))
        out = []
        v = a
        while v <= b + 1e-9:
            out.append(round(v, 9))
            v += step
        return tuple(out)
    return tuple(float(x) for x in text.split(","))


# ----------------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------------

def _cmd_construct(args) -> int:
    d = cst.load_descriptor(args.descriptor)
    code = cst.build_from_descriptor(d)
    write_alist(code.matrix, args.out_alist)
    meta = cst.meta_dict(code)
    with open(args.out_meta, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"constructed family={code.spec.family} n={code.n} k={code.k} "
          f"rate={code.spec.rate:.4f} -> {args.out_alist}")
    return EXIT_OK


_KNOWN_CHECKS = ("girth", "fourcycle", "mds", "fossorier", "moore-mds",
                 "cm-pairs")


def _cmd_verify(args) -> int:
    code, mat = _load_input(args.input, args.field)
    checks = tuple(c.strip() for c in args.checks.split(",")) if args.checks \
        else ("girth", "fourcycle")
    for c in checks:
        if c not in _KNOWN_CHECKS:
            raise CliError(f"unknown check {c!r}; known: {','.join(_KNOWN_CHECKS)}")
    results = []
    for c in checks:
        if c == "girth":
            rep = vfy.girth(mat, cap=args.cap)
            val = rep.girth if rep.girth is not None else \
                (f">{args.cap}" if not rep.acyclic else "infinite")
            results.append(vfy.CheckResult(
                "girth", rep.girth is None or rep.girth >= 6,
                {"girth": val, "cap": args.cap}))
        elif c == "fourcycle":
            has4 = vfy.has_four_cycles(mat)
            results.append(vfy.CheckResult("fourcycle", not has4,
                                           {"four_cycles": has4}))
        elif c == "mds":
            if code is None:
                raise CliError("mds check needs a descriptor input")
            total = comb(code.plan.block_cols, code.plan.block_rows)
            if args.sample:
                rep = vfy.mds_sampled(code.plan, args.sample, args.seed)
            elif total > 10 ** 6 and not args.force:
                raise CliError(f"{total} subsets; rerun with --sample K or "
                               "--force", EXIT_BUDGET)
            else:
                rep = vfy.mds_exhaustive(code.plan, force=args.force)
            results.append(vfy.CheckResult(
                "mds", rep.ok,
                {"checked": rep.checked, "exhaustive": rep.exhaustive,
                 "subsets": rep.total},
                witness=str(rep.failing) if rep.failing else None))
        elif c == "fossorier":
            if code is None:
                raise CliError("fossorier check needs a descriptor input")
            grid = cst.plan_exponent_grid(code.plan)
            results.append(vfy.CheckResult(
                "fossorier", vfy.fossorier_check(grid, code.spec.block_size),
                {"N": code.spec.block_size}))
        elif c == "moore-mds":
            if code is None or code.spec.family != cst.FAMILY_MOORE:
                raise CliError("moore-mds check needs a moore-pucm descriptor")
            rep = code.spec.certificates["moore_mds_condition"]
            results.append(vfy.CheckResult(
                "moore-mds", rep["ok"], {"subsets": rep["subsets"]},
                witness=str(rep["failures"][:8]) if rep["failures"] else None))
        elif c == "cm-pairs":
            if code is None or code.spec.family != cst.FAMILY_MOORE:
                raise CliError("cm-pairs check needs a moore-pucm descriptor")
            rep = code.spec.certificates["four_cycle_conditions"]
            results.append(vfy.CheckResult(
                "cm-pairs", rep["ok"], {},
                witness=str(rep["failures"][:8]) if rep["failures"] else None))
    sys.stdout.write(vfy.certificate_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


def _cmd_simulate(args) -> int:
    code, mat = _load_input(args.input, args.field)
    if not mat.is_binary:
        raise CliError("simulation drives the binary sum-product decoder only")
    cfg = simmod.SimConfig(
        snr_db=_snr_list(args.snr), seed=args.seed, max_iter=args.max_iter,
        min_block_errors=args.min_block_errors, max_frames=args.max_frames,
        source=args.source)
    res = simmod.run(mat, cfg)
    simmod.write_csv(res, args.out)
    print(simmod.CSV_HEADER)
    for p in res.points:
        print(f"{p.snr_db:g},{p.frames},{p.bit_errors},{p.block_errors},"
              f"{p.ber:.6g},{p.bler:.6g},{p.avg_iters:.6g}")
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_search(args) -> int:
    field = _parse_field(args.field) if args.field else Field(2, 1)
    try:
        polys = cst.search_moore_polys(
            field, args.N, args.m, args.r, t=args.t, seed=args.seed,
            budget=args.budget, require_girth=not args.skip_girth)
    except cst.BudgetExhaustedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    ctx = polys[0].ctx
    d = {"family": cst.FAMILY_MOORE, "field": field.to_dict(), "N": args.N,
         "r": args.r, "polys": [ctx.format(p) for p in polys]}
    if args.skip_girth:
        d["require_girth"] = False
    cst.write_descriptor(d, args.out)
    for p in polys:
        print(ctx.format(p))
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_info(args) -> int:
    code, mat = _load_input(args.input, args.field)
    print(f"size: {mat.nrows} x {mat.ncols} over GF({mat.field.order})")
    print(f"nonzeros: {mat.nnz} (density {mat.nnz / (mat.nrows * mat.ncols):.5f})")
    rank = mat.rank()
    print(f"rank: {rank}  dimension: {mat.ncols - rank}")
    if code is not None:
        meta = cst.meta_dict(code)
        print(json.dumps(meta, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="blockmds",
        description="Construct, certify and simulate block MDS LDPC codes "
                    "from punctured circulant matrices.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="materialize a descriptor")
    p.add_argument("descriptor")
    p.add_argument("--out-alist", required=True)
    p.add_argument("--out-meta", required=True)
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("verify", help="run certification checks")
    p.add_argument("input", help="descriptor or alist")
    p.add_argument("--checks", default=None,
                   help=f"comma list of {','.join(_KNOWN_CHECKS)}")
    p.add_argument("--cap", type=int, default=12)
    p.add_argument("--field", default=None)
    p.add_argument("--sample", type=int, default=0)
    p.add_argument("--force", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("girth", help="girth certificate only")
    p.add_argument("input")
    p.add_argument("--cap", type=int, default=12)
    p.add_argument("--field", default=None)
    p.set_defaults(func=_cmd_verify, checks="girth", sample=0, force=False,
                   seed=0)

    p = sub.add_parser("mds", help="MDS certificate only")
    p.add_argument("input")
    p.add_argument("--sample", type=int, default=0)
    p.add_argument("--force", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--field", default=None)
    p.set_defaults(func=_cmd_verify, checks="mds", cap=12)

    p = sub.add_parser("simulate", help="Monte-Carlo BER/BLER over AWGN")
    p.add_argument("input")
    p.add_argument("--snr", required=True, help="a:step:b or comma list (Eb/N0 dB)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--min-block-errors", type=int, default=100)
    p.add_argument("--max-frames", type=int, default=100000)
    p.add_argument("--source", choices=("zero", "random"), default="zero")
    p.add_argument("--field", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("search", help="search Moore polynomial sets")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=100000)
    p.add_argument("--field", default=None)
    p.add_argument("--skip-girth", action="store_true",
                   help="MDS conditions only (no girth guarantee)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("info", help="matrix/code summary")
    p.add_argument("input")
    p.add_argument("--field", default=None)
    p.set_defaults(func=_cmd_info)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (cst.BudgetExhaustedError, cst.NoSetFoundError,
            vfy.OversizeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (cst.ConstructionError, FieldError, RingError, MatrixError,
            simmod.ConfigInvalidError, OSError, KeyError, TypeError,
            ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
