"""Command-line interface: solve, verify, wavefunction, scan, algebra.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 no solution.
Data goes to stdout (or --out), diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import itertools
import math
import os
import sys
from typing import Sequence

from . import sl2
from .documents import (
    DocumentError,
    bundle,
    doc_derived,
    doc_roots,
    doc_sector,
    dumps,
    fmt,
    parse_documents,
    to_csv,
)
from .models import (
    ModelSector,
    SectorError,
    SectorSolution,
    build_ode,
    certify_sector,
    sample_wavefunction,
    solve_sector,
    wavefunction,
)
from .qes import SearchConfig

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NONE = 0, 1, 2, 3
DEFAULT_SEED = 42
VERIFY_REL = 1e-9


class UsageError(Exception):
    pass


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("QESREL_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"QESREL_SEED must be an integer, got {env!r}") from None


def _int_range(text: str) -> list[int]:
    """'3' or '1..4' (inclusive)."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected INT or A..B, got {text!r}") from None


# -- shared flags -----------------------------------------------------------

def _add_sector_flags(p: argparse.ArgumentParser, ranges: bool = False) -> None:
    num = _int_range if ranges else int
    p.add_argument("--model", required=True, choices=["dirac", "kg"])
    p.add_argument("--q", required=True, type=int, choices=[1, 2])
    p.add_argument("--n", required=True, type=num)
    p.add_argument("--kappa", type=num)
    p.add_argument("--ell", type=num)
    p.add_argument("--mu", required=True, type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--z-delta", type=float)
    p.add_argument("--zs", type=float)
    p.add_argument("--zv", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--policy", default="solve-beta", choices=["solve-beta", "solve-coupling", "check"])
    p.add_argument("--allow-any-kappa", action="store_true")
    p.add_argument("--seed", type=int)


def _sector_kwargs(args) -> dict:
    if args.model == "dirac":
        if args.ell is not None or args.zs is not None or args.zv is not None:
            raise UsageError("--ell, --zs and --zv apply to --model kg")
        if args.kappa is None:
            raise UsageError("--model dirac needs --kappa")
    else:
        if args.kappa is not None or args.z_delta is not None or args.c is not None:
            raise UsageError("--kappa, --z-delta and --c apply to --model dirac")
        if args.ell is None:
            raise UsageError("--model kg needs --ell")
    kw = dict(kind=args.model, q=args.q, mu=args.mu, beta=args.beta, policy=args.policy,
              allow_any_kappa=args.allow_any_kappa)
    if args.model == "dirac":
        kw.update(c=args.c if args.c is not None else 0.0, z_delta=args.z_delta)
    else:
        kw.update(z_s=args.zs, z_v=args.zv)
    return kw


def _make_sector(kw: dict, n: int, angular: int) -> ModelSector:
    key = "kappa" if kw["kind"] == "dirac" else "ell"
    try:
        return ModelSector(n=n, **{key: angular}, **kw)
    except SectorError as exc:
        raise UsageError(str(exc)) from None


def _write(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _warn(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read_docs(path: str) -> list[dict]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_documents(text)
    except DocumentError as exc:
        raise UsageError(f"{path}: {exc}") from None


# -- solve ------------------------------------------------------------------

_SOLUTION_COLUMNS = (
    "model", "q", "n", "kappa", "ell", "mu", "c", "z_delta", "z_s", "z_v", "policy",
    "energy", "decay", "beta", "w", "lambda1", "lambda2", "roots",
    "bethe_residual", "closure_residual", "certified",
)


def _solution_row(sol: SectorSolution) -> list:
    s, d = sol.sector, sol.derived
    return [
        s.kind.value, s.q, s.n, s.kappa, s.ell, s.mu, s.c if s.kind.value == "dirac" else None,
        s.z_delta, s.z_s, s.z_v, s.policy.value,
        d.energy, d.decay, s.beta, sol.w, d.lambda1, d.lambda2,
        ";".join(fmt(float(r)) for r in sol.roots),
        sol.bethe.bethe_residual_norm, sol.bethe.closure_residual_norm, sol.certified,
    ]


def cmd_solve(args) -> int:
    kw = _sector_kwargs(args)
    sector = _make_sector(kw, args.n, args.kappa if args.model == "dirac" else args.ell)
    diag: list[str] = []
    sols = solve_sector(sector, SearchConfig(seed=_seed(args)), diag)
    for msg in diag:
        _warn(msg)
    if args.format == "csv":
        _write(args, to_csv(_SOLUTION_COLUMNS, (_solution_row(s) for s in sols)))
    else:
        _write(args, dumps(bundle(sols, diag)))
    return EXIT_OK if any(s.certified for s in sols) else EXIT_NONE


# -- verify -----------------------------------------------------------------

def _sci(x: float | None) -> str:
    if x is None or not math.isfinite(x):
        return "inf"
    if x == 0:
        return "0.0e0"
    m, e = f"{x:.1e}".split("e")
    return f"{m}e{int(e)}"


def _close(a, b) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return abs(a - b) <= VERIFY_REL * max(1.0, abs(a), abs(b))


def cmd_verify(args) -> int:
    docs = _read_docs(args.path)
    if not docs:
        print("no solutions in document")
        return EXIT_VERIFY
    ok_all = True
    for i, doc in enumerate(docs, 1):
        try:
            sector = doc_sector(doc)
            stored = doc_derived(doc)
            roots = doc_roots(doc)
        except DocumentError as exc:
            raise UsageError(str(exc)) from None
        problems = []
        try:
            sol = certify_sector(sector, stored.energy, roots)
        except SectorError as exc:
            print(f"solution {i}: certified: false ({exc})")
            ok_all = False
            continue
        fresh = sol.derived.to_dict()
        for key, val in stored.to_dict().items():
            if not _close(val, fresh[key]):
                problems.append(f"{key} stored {val!r} recomputes to {fresh[key]!r}")
        if doc["certified"] is not True:
            problems.append("document is not marked certified")
        ok = sol.certified and not problems
        ok_all &= ok
        print(
            f"solution {i}: certified: {'true' if sol.certified else 'false'}, "
            f"closure_residual {_sci(sol.bethe.closure_residual_norm)}, "
            f"bethe_residual {_sci(sol.bethe.bethe_residual_norm)}"
        )
        for key, val in sol.constraint_residuals.items():
            print(f"  {key}: {_sci(abs(val))}")
        for p in problems + list(sol.diagnostics):
            print(f"  ! {p}")
    return EXIT_OK if ok_all else EXIT_VERIFY


# -- wavefunction -----------------------------------------------------------

def cmd_wavefunction(args) -> int:
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    if args.r_max is not None and not args.r_max > 0:
        raise UsageError("--r-max must be positive")
    docs = _read_docs(args.solution)
    if not 1 <= args.index <= len(docs):
        raise UsageError(f"--index {args.index} out of range (document holds {len(docs)} solutions)")
    doc = docs[args.index - 1]
    try:
        sector, roots = doc_sector(doc), doc_roots(doc)
        sol = certify_sector(sector, doc_derived(doc).energy, roots)
        wf = wavefunction(sol)
    except (DocumentError, SectorError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    if not sol.certified:
        _warn("warning: solution does not certify; sampling anyway")
    table = sample_wavefunction(wf, r_max=args.r_max, points=args.points, normalize=args.normalize)
    _write(args, to_csv(table.columns, ([float(v) for v in row] for row in table.rows)))
    return EXIT_OK


# -- scan -------------------------------------------------------------------

_SCAN_COLUMNS = (
    "model", "q", "n", "kappa", "ell", "mu", "c", "z_delta", "z_s", "z_v", "beta_in", "policy",
    "found", "solution", "energy", "decay", "beta", "w", "lambda1", "lambda2",
    "bethe_residual", "closure_residual",
)


def cmd_scan(args) -> int:
    kw = _sector_kwargs(args)
    angular = args.kappa if args.model == "dirac" else args.ell
    if not args.n or not angular:
        raise UsageError("empty range")
    seed = _seed(args)
    rows = []
    for n, a in itertools.product(args.n, angular):
        sector = _make_sector(kw, n, a)
        diag: list[str] = []
        sols = solve_sector(sector, SearchConfig(seed=seed), diag)
        head = [sector.kind.value, sector.q, n, sector.kappa, sector.ell, sector.mu,
                sector.c if sector.kind.value == "dirac" else None,
                sector.z_delta, sector.z_s, sector.z_v, sector.beta, sector.policy.value]
        if not sols:
            rows.append(head + [False, None] + [None] * 8)
        for k, sol in enumerate(sols, 1):
            d = sol.derived
            rows.append(head + [
                sol.certified, k, d.energy, d.decay, sol.beta, sol.w, d.lambda1, d.lambda2,
                sol.bethe.bethe_residual_norm, sol.bethe.closure_residual_norm,
            ])
    _write(args, to_csv(_SCAN_COLUMNS, rows))
    return EXIT_OK


# -- algebra ----------------------------------------------------------------

def cmd_algebra(args) -> int:
    kw = _sector_kwargs(args)
    sector = _make_sector(kw, args.n, args.kappa if args.model == "dirac" else args.ell)
    diag: list[str] = []
    sols = [s for s in solve_sector(sector, SearchConfig(seed=_seed(args)), diag) if s.certified]
    if not sols:
        for msg in diag:
            _warn(msg)
        print("no certified solution to build the operator from")
        return EXIT_NONE
    sol = sols[0]
    ode = build_ode(sol.sector, sol.derived)
    n = sector.n
    cond = sl2.qes_condition(ode, n)
    print(f"sector: {sector.kind.value} q={sector.q} n={n} beta={fmt(sol.beta)} energy={fmt(sol.derived.energy)}")
    print(f"qes condition: {'true' if cond else 'false'}")
    for v in cond.violations:
        print(f"  violated: {v}")
    minus_c0 = -ode.c(0)
    if cond:
        H = sl2.assemble_H(ode, n)
        D = sl2.direct_matrix(ode, n)
        dev, at = sl2.max_deviation(H, D)
        print(f"max |assemble_H - direct_matrix|: {_sci(dev)} at entry {at}")
        if sector.kind.value == "dirac" and sector.q == 1:
            pf = sl2.dirac_q1_printed_form(n, sector.kappa, sol.derived.decay, sol.beta)
            pdev, pat = sl2.max_deviation(pf, D)
            print(f"max |printed form - direct_matrix|: {_sci(pdev)} at entry {pat}")
    else:
        try:
            D = sl2.direct_matrix(ode, n)
        except sl2.InvarianceError as exc:
            print(f"direct matrix: {exc}")
            return EXIT_OK
    spec = sl2.spectrum(D)
    print("spectrum: " + ", ".join(fmt(v) for v in spec.real))
    for z in spec.complex_pairs:
        print(f"  complex pair: {fmt(z.real)} +/- {fmt(z.imag)}i (non-physical)")
    print(f"-c0 = {fmt(minus_c0)}; in spectrum: {'true' if spec.contains(minus_c0) else 'false'}")
    return EXIT_OK


# -- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qesrel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one sector")
    _add_sector_flags(p)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="re-certify a stored solution document")
    p.add_argument("path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("wavefunction", help="sample the radial function of a stored solution")
    p.add_argument("--solution", required=True)
    p.add_argument("--r-max", type=float)
    p.add_argument("--points", type=int, default=400)
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--index", type=int, default=1, help="which solution of a bundle (1-based)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_wavefunction)

    p = sub.add_parser("scan", help="tabulate sectors over ranges of n and kappa/ell")
    _add_sector_flags(p, ranges=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("algebra", help="sl(2) algebraization check for one sector")
    _add_sector_flags(p)
    p.set_defaults(func=cmd_algebra)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad flags
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qesrel {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
