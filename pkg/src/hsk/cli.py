"""Command-line driver: ``hsk {bessel,factorize,spectrum,hardy,hilbert}``.

Every subcommand emits a run report (JSON by default, or CSV) listing named
checks with measured value, bound and status. Floats are written with 17
significant digits. Exit codes: 0 all checks pass, 1 a check failed,
2 invalid input.

CSV layout (RFC 4180, CRLF line ends), one record per row::

    section,name,index,value,bound,status

``section`` is one of ``command``, ``parameter``, ``check``, ``table`` or
``note``; unused fields are empty.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import bessel as bes
from . import hankel as hk
from . import hardy as hd
from . import twkernel as tw
from .numerics import operator_norm, sym_eigen

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Invalid parameters or a malformed input file (exit code 2)."""


@dataclass
class Check:
    name: str
    value: float
    bound: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.bound)


@dataclass
class RunReport:
    command: str
    parameters: dict[str, Any]
    checks: list[Check] = field(default_factory=list)
    tables: dict[str, list] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    condition_failed: bool = False
    duration: float | None = None

    def check(self, name: str, value: float, bound: float) -> Check:
        c = Check(name, float(value), float(bound))
        self.checks.append(c)
        return c

    @property
    def passed(self) -> bool:
        return not self.condition_failed and all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.passed else EXIT_FAIL


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _json(obj: Any, indent: int = 0) -> str:
    # json.dumps writes shortest round-trip floats; reports need fixed 17
    # significant digits, so emit numbers ourselves.
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k), ensure_ascii=False)}: {_json(v, indent + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_json(v) for v in seq) + "]"
        return "[\n" + ",\n".join(inner + _json(v, indent + 1) for v in seq) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json(report: RunReport) -> str:
    doc = {
        "command": report.command,
        "parameters": report.parameters,
        "status": "pass" if report.passed else "fail",
        "checks": [
            {"name": c.name, "value": c.value, "bound": c.bound,
             "status": "pass" if c.passed else "fail"}
            for c in report.checks
        ],
        "tables": report.tables,
        "notes": report.notes,
    }
    if report.duration is not None:
        doc["duration_s"] = report.duration
    return _json(doc) + "\n"


def _cell(v: Any) -> str:
    if isinstance(v, (float, np.floating)):
        return fmt_float(v).strip('"')
    return "" if v is None else str(v)


def to_csv(report: RunReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["section", "name", "index", "value", "bound", "status"])
    w.writerow(["command", report.command, "", "", "", "pass" if report.passed else "fail"])
    for k, v in report.parameters.items():
        w.writerow(["parameter", k, "", _cell(v), "", ""])
    for c in report.checks:
        w.writerow(["check", c.name, "", _cell(c.value), _cell(c.bound),
                    "pass" if c.passed else "fail"])
    for name, rows in report.tables.items():
        for i, v in enumerate(rows):
            if isinstance(v, dict):
                for key, val in v.items():
                    w.writerow(["table", f"{name}.{key}", i, _cell(val), "", ""])
            else:
                w.writerow(["table", name, i, _cell(v), "", ""])
    for note in report.notes:
        w.writerow(["note", note, "", "", "", ""])
    if report.duration is not None:
        w.writerow(["parameter", "duration_s", "", _cell(report.duration), "", ""])
    return buf.getvalue()


# --- subcommands -----------------------------------------------------------


def cmd_bessel(args) -> RunReport:
    if not args.theta > 0:
        raise InputError(f"--theta must be positive, got {args.theta}")
    if args.n_max < 1:
        raise InputError("--n-max must be at least 1")
    table = bes.bessel_row(args.theta, args.n_max)
    rep = RunReport("bessel", {"theta": args.theta, "n_max": args.n_max})
    rep.check("parseval_residual", table.parseval_residual(), 1e-12)
    rec = [bes.recurrence_residual(table, n) for n in range(table.n_max - 1)]
    rep.check("max_recurrence_residual", max(map(abs, rec), default=0.0), 1e-12)
    z = table.z
    if z <= 20:
        dev = [abs(table.values[n] - bes.bessel_series_oracle(n, z)) for n in range(table.n_max + 1)]
        # the oracle's cancellation only allows a tight comparison for moderate z
        rep.check("max_oracle_deviation", max(dev), 1e-12 if z <= 2 else 1e-12 * math.exp(2 * z))
        rep.tables["oracle_deviation"] = dev
    rep.check("tail_bound", table.tail_bound(), 1.0)
    rep.tables["J"] = list(table.values)
    rep.tables["recurrence_residual"] = rec
    return rep


def _parse_spec_file(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read spec file: {exc}") from exc
    keys: dict[str, str] = {}
    sections: dict[str, list[list[float]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current not in ("L", "M", "coefficients"):
                raise InputError(f"line {lineno}: unknown section [{current}]")
            if current in sections:
                raise InputError(f"line {lineno}: duplicate section [{current}]")
            sections[current] = []
            continue
        if current is None:
            if "=" not in line:
                raise InputError(f"line {lineno}: expected key = value")
            k, v = (s.strip() for s in line.split("=", 1))
            keys[k] = v
            continue
        try:
            sections[current].append([float(t) for t in line.split()])
        except ValueError as exc:
            raise InputError(f"line {lineno}: {exc}") from exc

    for name in ("L", "M", "coefficients"):
        if name not in sections:
            raise InputError(f"missing section [{name}]")
    for name in ("L", "M"):
        rows = sections[name]
        if len(rows) != 2 or any(len(r) != 2 for r in rows):
            raise InputError(f"section [{name}] must hold two rows of two numbers")
    coeff_rows = sections["coefficients"]
    if not coeff_rows or any(len(r) != 3 for r in coeff_rows):
        raise InputError("[coefficients] rows must be 'x A(x) B(x)'")
    if [int(r[0]) for r in coeff_rows] != list(range(len(coeff_rows))) or any(
        r[0] != int(r[0]) for r in coeff_rows
    ):
        raise InputError("[coefficients] must list x = 0, 1, 2, ... in order")
    if "tail_bound" not in keys:
        raise InputError("missing required key tail_bound")
    try:
        tail = float(keys["tail_bound"])
        wtail = float(keys["weighted_tail_bound"]) if "weighted_tail_bound" in keys else None
    except ValueError as exc:
        raise InputError(f"bad tail bound: {exc}") from exc
    if not tail >= 0:
        raise InputError("tail_bound must be non-negative")
    rec = tw.AffineRecurrence(sections["L"], sections["M"])
    a = tw.CoefficientSequence([r[1:] for r in coeff_rows], tail, wtail)
    return rec, a


def cmd_factorize(args) -> RunReport:
    if args.size < 2:
        raise InputError("--size must be at least 2")
    if args.tail < 1:
        raise InputError("--tail must be at least 1")
    if not args.tol > 0:
        raise InputError("--tol must be positive")
    params: dict[str, Any] = {"size": args.size, "tail": args.tail, "tol": args.tol}
    if args.spec_file is not None:
        rec, a = _parse_spec_file(args.spec_file)
        params["spec_file"] = os.path.basename(args.spec_file)
    else:
        if not args.theta > 0:
            raise InputError(f"--theta must be positive, got {args.theta}")
        params["theta"] = args.theta
        rec = tw.bessel_recurrence(args.theta)
        a = tw.bessel_coefficients(args.theta, args.size + args.tail)
    rep = RunReport("factorize", params)

    report = tw.check_affine_conditions(rec, args.tol)
    rep.tables["C"] = [list(r) for r in report.C]
    rep.tables["conditions"] = [{
        "det_L": report.det_L, "det_M": report.det_M,
        "symmetry_defect": report.symmetry_defect, "lambda": report.lam,
        "lambda2": report.lam2, "alpha": report.eigenvector[0],
        "beta": report.eigenvector[1], "verdict": report.verdict,
    }]
    rep.check("recurrence_defect", tw.recurrence_defect(a, rec), 1e-12)
    if not report.passed:
        rep.condition_failed = True
        rep.notes.extend(f"condition failed: {r}" for r in report.reasons)
        return rep

    phi, sign = tw.extract_symbol(report, a)
    need = args.size + args.tail - 1
    if len(phi) < need:
        raise InputError(
            f"{len(phi)} coefficients cannot cover size {args.size} with tail {args.tail}"
        )
    try:
        fr = tw.verify_factorization(a, phi, sign, args.size, args.tail)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    rep.parameters["sign"] = sign
    rep.check("factorization_error", fr.max_error, 1e-10)
    rep.check("factorization_certified", fr.max_error, fr.certified_bound)
    rep.check("symbol_tail", phi.tail_from(args.tail), 1e-14)
    x, y = fr.argmax
    rep.notes.append(f"largest deviation at (x, y) = ({x}, {y})")
    rep.tables["phi"] = list(phi.phi[: args.size])
    return rep


def cmd_spectrum(args) -> RunReport:
    if args.size < 2:
        raise InputError("--size must be at least 2")
    if not args.theta > 0:
        raise InputError(f"--theta must be positive, got {args.theta}")
    if not args.cluster_tol > 0:
        raise InputError("--cluster-tol must be positive")
    n, k_tail = args.size, args.tail
    rep = RunReport("spectrum", {"theta": args.theta, "size": n,
                                 "cluster_tol": args.cluster_tol, "tail": k_tail})
    a = tw.bessel_coefficients(args.theta, 2 * n + k_tail)
    cond = tw.check_affine_conditions(tw.bessel_recurrence(args.theta))
    phi, sign = tw.extract_symbol(cond, a)
    sr = hk.spectral_report(phi, n, args.cluster_tol)
    rep.check("spectral_mapping_residual", sr.mapping_residual, 1e-10 * sr.norm ** 2)
    rep.check("multiplicity_mismatches", sum(not r.consistent for r in sr.rows), 0)

    lhs, rhs, bound = tw.trace_check(a, phi, sign, n, k_tail)
    rep.check("trace_agreement", abs(lhs - rhs), bound)
    rep.check("trace_remainder", bound, 1e-10)

    rep.tables["gamma_eigenvalues"] = list(sr.eigenvalues)
    rep.tables["square_eigenvalues"] = list(sr.square_eigenvalues)
    rep.tables["multiplicity"] = [
        {"s2": r.square, "nu_s2": r.nu_square, "nu_plus": r.nu_plus,
         "nu_minus": r.nu_minus, "mpt_flag": "flag" if r.mpt_flag else "ok"}
        for r in sr.rows
    ]
    rep.parameters["clustering_status"] = sr.status
    rep.parameters["kernel_dimension"] = sr.kernel_dimension
    rep.parameters["mpt_flags"] = len(sr.mpt_flags)
    rep.parameters["trace"] = rhs
    rep.notes.extend(sr.warnings)
    return rep


def cmd_hardy(args) -> RunReport:
    if args.degree < 0:
        raise InputError("--degree must be non-negative")
    if args.size < 1:
        raise InputError("--size must be at least 1")
    params: dict[str, Any] = {"degree": args.degree, "seed": args.seed, "size": args.size}
    a = None
    if args.rational is not None:
        try:
            a = complex(args.rational.replace(" ", ""))
        except ValueError as exc:
            raise InputError(f"--rational: {exc}") from exc
        if abs(a) >= 1:
            raise InputError(f"--rational needs |a| < 1, got {abs(a)}")
        params["rational"] = args.rational
    g = hd.random_trig_polynomial(args.degree, args.seed)
    f = hd.conj_symbol(g)
    need = hd.quadrature_nodes(f, g, args.size)
    nodes = need if args.nodes is None else args.nodes
    if nodes < need:
        raise InputError(f"--nodes {nodes} is below the exactness threshold {need}")
    params["nodes"] = nodes
    rep = RunReport("hardy", params)
    wk = hd.w_kernel_matrix(f, g, args.size, nodes)
    ti = hd.toeplitz_identity_matrix(f, g, args.size)
    hp = hd.hankel_product_matrix(f, g, args.size)
    rep.check("w_vs_toeplitz", hd.max_pairwise_deviation(wk, ti), 1e-10)
    rep.check("w_vs_hankel", hd.max_pairwise_deviation(wk, hp), 1e-10)
    rep.check("toeplitz_vs_hankel", hd.max_pairwise_deviation(ti, hp), 1e-10)
    rep.tables["g_real"] = list(g.coeffs.real)
    rep.tables["g_imag"] = list(g.coeffs.imag)
    if a is not None:
        degree = hd._default_degree(a)
        rank = hd.finite_rank_check(a, degree, args.size)
        # Kronecker: the geometric coefficient Hankel block has rank one
        rep.check("rank_minus_oracle", abs(rank - 1), 0)
        rep.parameters["rational_degree"] = degree
        rep.parameters["rank"] = rank
    return rep


def cmd_hilbert(args) -> RunReport:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError as exc:
        raise InputError(f"--sizes: {exc}") from exc
    if not sizes:
        raise InputError("--sizes must list at least one size")
    if any(s < 1 for s in sizes) or sizes != sorted(sizes):
        raise InputError("--sizes must be positive and ascending")
    rep = RunReport("hilbert", {"sizes": ",".join(map(str, sizes))})
    phi = hk.hilbert_symbol(2 * sizes[-1])
    norms, sq_norms, rows = [], [], []
    for n in sizes:
        h = hk.hankel_matrix(phi, n)
        w = sym_eigen(h)[0]
        nrm = float(max(abs(w[0]), abs(w[-1])))
        sq = operator_norm(h @ h)
        norms.append(nrm)
        sq_norms.append(sq)
        rows.append({"size": n, "norm": nrm, "square_norm": sq, "min_eigenvalue": float(w[-1])})
        rep.check(f"norm_below_pi[{n}]", nrm, math.pi)
        rep.check(f"square_norm_below_pi2[{n}]", sq, math.pi ** 2)
        rep.check(f"psd[{n}]", -float(w[-1]), 1e-12)
    for i in range(1, len(sizes)):
        # strict increase, by more than the eigensolver's resolution
        rep.check(f"monotone[{sizes[i - 1]}<{sizes[i]}]", norms[i - 1] - norms[i],
                  -1e-12 * norms[i])
    rep.tables["norms"] = rows
    return rep


# --- entry point -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hsk", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--timing", action="store_true",
                        help="include wall-clock duration (breaks byte-identical output)")

    s = sub.add_parser("bessel", help="tabulate J_n(2 sqrt(theta)) with checks")
    s.add_argument("--theta", type=float, required=True)
    s.add_argument("--n-max", type=int, default=40)
    common(s)
    s.set_defaults(func=cmd_bessel)

    s = sub.add_parser("factorize", help="check conditions and verify K = sign * Gamma^2")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--theta", type=float)
    src.add_argument("--spec-file")
    s.add_argument("--size", type=int, default=32)
    s.add_argument("--tail", type=int, default=400)
    s.add_argument("--tol", type=float, default=1e-10)
    common(s)
    s.set_defaults(func=cmd_factorize)

    s = sub.add_parser("spectrum", help="spectral mapping, multiplicities and trace")
    s.add_argument("--theta", type=float, required=True)
    s.add_argument("--size", type=int, default=64)
    s.add_argument("--cluster-tol", type=float, default=1e-8)
    s.add_argument("--tail", type=int, default=400)
    common(s)
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("hardy", help="three-path check of R+ W R+ on H^2")
    s.add_argument("--degree", type=int, default=8)
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--size", type=int, default=24)
    s.add_argument("--nodes", type=int)
    s.add_argument("--rational", help="a with |a| < 1: rank check for g = z/(1 - a z)")
    common(s)
    s.set_defaults(func=cmd_hardy)

    s = sub.add_parser("hilbert", help="norms of Hilbert-matrix truncations")
    s.add_argument("--sizes", default="16,64,256")
    common(s)
    s.set_defaults(func=cmd_hilbert)
    return p


def _limit_threads() -> None:
    raw = os.environ.get("HSK_THREADS")
    if not raw:
        return
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"HSK_THREADS must be a positive integer, got {raw!r}")
    if n < 1:
        raise InputError(f"HSK_THREADS must be a positive integer, got {raw!r}")
    from threadpoolctl import threadpool_limits

    threadpool_limits(n)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        _limit_threads()
        report = args.func(args)
    except InputError as exc:
        print(f"hsk {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.timing:
        report.duration = time.perf_counter() - t0
    text = to_csv(report) if args.format == "csv" else to_json(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
