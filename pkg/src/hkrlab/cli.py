"""Command-line frontend.

Every subcommand builds a :class:`Report` and hands it to :func:`emit`, which
renders JSON (default) or CSV.  Output is deterministic for a fixed config;
wall-clock timings appear only with ``--timings``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from . import __version__
from .acceptance import CHECKS, FAIL, PASS, Verdict, run_all
from .algebra import AlgebraError, FPGradedAlgebra, parse_algebra
from .circlehopf import (
    AugmentedAlgebra,
    cartier_dual_check,
    ext_colimit_tower,
    ext_self,
    mu_z_duality_check,
)
from .complexes import HomologyGroup
from .exactalg import BaseRing, PrimeField, is_prime, parse_ring
from .fgl import MAX_DIST_N, cartier_interpolation_check, distributions, interpolation_fgl
from .hochschild import (
    BudgetExceeded,
    de_rham_cohomology,
    hc_minus,
    hc_minus_dr,
    hkr_check,
    hochschild_homology,
    hochschild_slice,
    truncated_de_rham_homology,
    truncation_degrees,
)
from .testrings import parse_carrier
from .witt import MAP_KINDS, MAX_M, MAX_P, build_witt_law, enumerate_kernel, is_cyclic_group

HH_COLUMNS = ("n", "internal_degree", "free_rank", "torsion")
FAMILY_LETTERS = {"sum": "S", "product": "P", "negation": "N", "frobenius": "F"}


class ConfigError(ValueError):
    def __init__(self, name: str, message: str):
        super().__init__(f"invalid --{name}: {message}")
        self.name = name


@dataclass
class RunConfig:
    command: str
    ring: str | None = None
    algebra: str | None = None
    p: int | None = None
    m: int | None = None
    N: int | None = None
    U: int | None = None
    window: int | None = None
    degree: int | None = None
    q_max: int | None = None
    extra: dict[str, Any] = field(default_factory=dict)
    output: str | None = None
    format: str = "json"
    timings: bool = False

    def echo(self) -> dict:
        d = asdict(self)
        for k in ("output", "timings", "format"):
            d.pop(k)
        extra = d.pop("extra")
        d.update(extra)
        return {k: v for k, v in d.items() if v is not None}


def _need(cfg: RunConfig, name: str, lo: int | None = None, hi: int | None = None) -> int:
    v = getattr(cfg, name) if hasattr(cfg, name) else cfg.extra.get(name)
    if v is None:
        raise ConfigError(name, "required")
    if lo is not None and v < lo:
        raise ConfigError(name, f"must be >= {lo}, got {v}")
    if hi is not None and v > hi:
        raise ConfigError(name, f"must be <= {hi}, got {v}")
    return v


def _prime(cfg: RunConfig, hi: int = MAX_P) -> int:
    p = _need(cfg, "p", 2, hi)
    if not is_prime(p):
        raise ConfigError("p", f"{p} is not prime")
    return p


def _ring(cfg: RunConfig, default: str) -> BaseRing:
    try:
        return parse_ring(cfg.ring or default)
    except ValueError as exc:
        raise ConfigError("ring", str(exc)) from exc


def _algebra(cfg: RunConfig) -> FPGradedAlgebra:
    if not cfg.algebra:
        raise ConfigError("algebra", "required, e.g. \"Q[x,y]\" or \"Q[x(2),y(3)]/(y^2-x^3)\"")
    try:
        return parse_algebra(cfg.algebra)
    except (AlgebraError, ValueError, SyntaxError) as exc:
        raise ConfigError("algebra", str(exc)) from exc


@dataclass
class Report:
    config: RunConfig
    results: dict = field(default_factory=dict)
    verdicts: list[Verdict] = field(default_factory=list)
    table: tuple[Sequence[str], list[dict]] | None = None
    stages: dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def to_json(self) -> dict:
        out = {
            "tool": "hkrlab",
            "version": __version__,
            "command": self.config.command,
            "config": self.config.echo(),
            "results": self.results,
            "verdicts": [v.to_json(self.config.timings) for v in self.verdicts],
        }
        if self.config.timings:
            out["timings"] = {k: f"{s:.3f}" for k, s in self.stages.items()}
        return out


def _check(n: int, title: str, ok: bool, details: dict | None = None, diagnostics: list[str] | None = None) -> Verdict:
    return Verdict(n, title, PASS if ok else FAIL, details or {}, list(diagnostics or []))


def normalize(obj: Any) -> Any:
    """JSON-ready copy: integers and fractions become decimal strings, keys become strings."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (int, Fraction)):
        return str(obj)
    if isinstance(obj, str):
        return obj
    if isinstance(obj, HomologyGroup):
        return normalize(obj.to_json())
    if hasattr(obj, "to_json"):
        return normalize(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, float):
        return f"{obj:.6g}"
    return str(obj)


def _csv_cell(v: Any) -> str:
    if isinstance(v, (list, tuple)):
        return ";".join(str(x) for x in v)
    return str(v)


def emit(report: Report, fmt: str = "json") -> bytes:
    if fmt == "json":
        text = json.dumps(normalize(report.to_json()), indent=2, ensure_ascii=False)
    elif fmt == "csv":
        if report.table is not None:
            cols, rows = report.table
        else:
            cols = ("criterion", "title", "status", "diagnostics")
            rows = [{k: getattr(v, k) for k in cols} for v in report.verdicts]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_csv_cell(normalize(r.get(c, ""))) for c in cols])
        text = buf.getvalue().rstrip("\n")
    else:
        raise ConfigError("format", f"unknown format {fmt!r}")
    return (text + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_witt_law(cfg: RunConfig) -> Report:
    p = _prime(cfg)
    m = _need(cfg, "m", 1, MAX_M)
    law = build_witt_law(p, m)
    results = law.to_json()
    results["text"] = {
        f"{FAMILY_LETTERS[fam]}_{i}": str(f)
        for fam in FAMILY_LETTERS
        for i, f in enumerate(getattr(law, f"{fam}_polys"))
    }
    ids = law.check_ghost_identities()
    integral = law.is_integral()
    v = [
        _check(1, "integer coefficients", integral, diagnostics=[] if integral else ["non-integer coefficient"]),
        _check(2, "ghost identities", all(ids.values()), ids, [f"{k} fails" for k, ok in ids.items() if not ok]),
    ]
    return Report(cfg, results, v)


def cmd_witt_enumerate(cfg: RunConfig) -> Report:
    p = _prime(cfg)
    m = _need(cfg, "m", 1, MAX_M)
    try:
        ring = parse_carrier(cfg.ring or f"F_{p}")
    except ValueError as exc:
        raise ConfigError("ring", str(exc)) from exc
    if not getattr(ring, "is_finite", False):
        raise ConfigError("ring", "enumeration needs a finite ring")
    if len(list(ring.elements())) ** m > 200_000:
        raise ConfigError("m", "too many Witt vectors to enumerate")
    kind = cfg.extra.get("map", "frobenius_minus_id")
    a = cfg.extra.get("a")
    if kind == "gp_at" and a is None:
        raise ConfigError("a", "required for map gp_at")
    ker = enumerate_kernel(kind, ring, p, m, None if a is None else ring.from_int(a))
    rows = [{"coords": w.to_json()["coords"]} for w in ker]
    results = {"map": kind, "ring": str(ring), "count": len(ker), "cyclic": is_cyclic_group(ker), "kernel": rows}
    v = [_check(1, "kernel is a subgroup", True)]
    if kind == "frobenius_minus_id" and ring == PrimeField(p):
        ok = len(ker) == p**m
        v.append(_check(2, "kernel has p^m elements", ok, {"expected": p**m}, [] if ok else [f"found {len(ker)}"]))
    return Report(cfg, results, v, (("coords",), rows))


def _hh_rows(A: FPGradedAlgebra, d: int, N: int) -> list[dict]:
    return [{"n": n, "internal_degree": d, **g.to_json()} for n, g in hochschild_homology(A, d, N).items()]


def cmd_hh(cfg: RunConfig) -> Report:
    A = _algebra(cfg)
    d = _need(cfg, "degree", 0)
    N = _need(cfg, "window", 0)
    rows = _hh_rows(A, d, N)
    ids = hochschild_slice(A, d, N + 1).check_identities()
    v = [_check(1, "b^2 = 0, B^2 = 0, bB + Bb = 0", all(ids.values()), ids, [f"{k} fails" for k, ok in ids.items() if not ok])]
    return Report(cfg, {"algebra": A.to_json(), "table": rows}, v, (HH_COLUMNS, rows))


def cmd_hcminus(cfg: RunConfig) -> Report:
    A = _algebra(cfg)
    d = _need(cfg, "degree", 0)
    U = _need(cfg, "U", 1)
    W = _need(cfg, "window", 0)
    degrees = range(-W, W + 1)
    model = cfg.extra.get("model", "bar")
    rows = [dict(e.to_json(), model="bar") for e in hc_minus(A, U, d, degrees)] if model in ("bar", "both") else []
    if model in ("de-rham", "both"):
        rows += [dict(e.to_json(), model="de-rham") for e in hc_minus_dr(A, U, d, degrees)]
    cols = ("model", "n", "internal_degree", "free_rank", "torsion", "stable")
    v = []
    if model == "both":
        bar = {r["n"]: r for r in rows if r["model"] == "bar"}
        bad = [r["n"] for r in rows if r["model"] == "de-rham" and r["stable"] and bar[r["n"]]["stable"]
               and (r["free_rank"], r["torsion"]) != (bar[r["n"]]["free_rank"], bar[r["n"]]["torsion"])]
        v.append(_check(1, "models agree on stable degrees", not bad, diagnostics=[f"degree {n} differs" for n in bad]))
    return Report(cfg, {"algebra": A.to_json(), "table": rows}, v, (cols, rows))


def cmd_dr(cfg: RunConfig) -> Report:
    A = _algebra(cfg)
    d = _need(cfg, "degree", 0)
    H = de_rham_cohomology(A, d)
    rows = [{"q": q, "internal_degree": d, **g.to_json()} for q, g in H.items()]
    trunc = []
    if A.is_smooth:
        for i in range(A.nvars + 1):
            for n, g in truncated_de_rham_homology(A, i, d).items():
                if n in truncation_degrees(A, i):
                    trunc.append({"i": i, "n": n, **g.to_json()})
    return Report(cfg, {"algebra": A.to_json(), "cohomology": rows, "truncations": trunc}, [],
                  (("q", "internal_degree", "free_rank", "torsion"), rows))


def cmd_hkr_check(cfg: RunConfig) -> Report:
    A = _algebra(cfg)
    qmax = _need(cfg, "q_max", 0)
    dmax = _need(cfg, "degree", 0)
    rows, diag = [], []
    for q in range(qmax + 1):
        for d in range(dmax + 1):
            r = hkr_check(A, q, d)
            hh = r["hh"]
            rank_ok = hh.free_rank == r["omega_rank"] and not hh.torsion
            rows.append({"q": q, "internal_degree": d, "omega_rank": r["omega_rank"], "hh": hh.to_json(), "iso": r["iso"]})
            if not rank_ok:
                diag.append(f"q={q} d={d}: HH {hh} vs Omega rank {r['omega_rank']}")
            if not r["iso"]:
                diag.append(f"q={q} d={d}: antisymmetrization is not an isomorphism")
    v = [_check(1, "HKR isomorphism", not diag, diagnostics=diag)]
    flat = [{"q": r["q"], "internal_degree": r["internal_degree"], "omega_rank": r["omega_rank"],
             "hh_free_rank": r["hh"]["free_rank"], "hh_torsion": r["hh"]["torsion"], "iso": r["iso"]} for r in rows]
    return Report(cfg, {"algebra": A.to_json(), "cells": rows}, v,
                  (("q", "internal_degree", "omega_rank", "hh_free_rank", "hh_torsion", "iso"), flat))


def cmd_circle_ext(cfg: RunConfig) -> Report:
    kind = cfg.extra.get("kind", "exterior")
    bound = _need(cfg, "window", 0, 8)
    if kind == "tower":
        p = _prime(cfg, 3)
        m = _need(cfg, "m", 2, 3)
        r = ext_colimit_tower(p, m, bound)
        rows = [{"s": s, "colimit_dim": n} for s, n in r["colimit"].items()]
        v = [_check(1, "transition ranks constant", r["ranks_constant"], diagnostics=[] if r["ranks_constant"] else ["ranks vary along the tower"])]
        return Report(cfg, r, v, (("s", "colimit_dim"), rows))
    ring = _ring(cfg, "Q")
    if kind == "exterior":
        A = AugmentedAlgebra.exterior(ring)
    elif kind == "truncated":
        A = AugmentedAlgebra.truncated_polynomial(ring, _need(cfg, "N", 2, 16))
    else:
        raise ConfigError("kind", f"unknown kind {kind!r}")
    ext = ext_self(A, bound)
    table = ext.to_json()
    return Report(cfg, table, [], (("s", "degree", "weight", "dim"), table["dims"]))


def cmd_cartier(cfg: RunConfig) -> Report:
    p = _prime(cfg, 3)
    m = _need(cfg, "m", 1, 2)
    r = cartier_dual_check(p, m)
    mz = mu_z_duality_check(PrimeField(p), p**m)
    v = [
        Verdict(1, "O(Ker) is dual to O(alpha)", r["verdict"], {"rank": r["rank"]}, list(r["diagnostics"])),
        Verdict(2, "O(mu) is dual to O(Z/n)", mz["verdict"], {"n": p**m}, list(mz["diagnostics"])),
    ]
    return Report(cfg, {"alpha": {k: r[k] for k in ("p", "m", "rank", "images")}, "mu": {"n": p**m}}, v)


def cmd_fgl(cfg: RunConfig) -> Report:
    N = _need(cfg, "N", 2, 12)
    lam = cfg.extra.get("lam", 0)
    ring = _ring(cfg, "Z")
    F = interpolation_fgl(ring(lam), N, ring)
    ax = F.check_axioms()
    results = {"law": F.to_json(), "text": str(F.series)}
    v = [_check(1, "formal group law axioms", all(ax.values()), ax, [f"{k} fails" for k, ok in ax.items() if not ok])]
    if ring.kind in ("Integers", "Rationals") and N <= MAX_DIST_N:
        D = distributions(F, N)
        results["distributions"] = D.to_json()
        hopf = D.check_axioms()
        v.append(_check(2, "distribution Hopf axioms", all(hopf.values()), hopf, [f"{k} fails" for k, ok in hopf.items() if not ok]))
    cp = cfg.extra.get("cartier_p")
    if cp is not None:
        if cp not in (2, 3):
            raise ConfigError("cartier-p", "must be 2 or 3")
        if N > 6:
            raise ConfigError("N", "interpolation Cartier check supports N <= 6")
        r = cartier_interpolation_check(cp, N)
        diag = [f"{row['check']} m={row['m']}: {x}" for row in r["rows"] for x in row["diagnostics"]]
        v.append(Verdict(3, "interpolation Cartier comparison", r["verdict"], {"rows": len(r["rows"])}, diag))
    return Report(cfg, results, v)


def _acceptance_report(cfg: RunConfig, criteria: list[int]) -> Report:
    verdicts = run_all(criteria)
    return Report(cfg, {"criteria": [v.criterion for v in verdicts]}, verdicts)


def cmd_all_acceptance(cfg: RunConfig) -> Report:
    criteria = cfg.extra.get("only") or sorted(CHECKS)
    rep = _acceptance_report(cfg, criteria)
    # determinism: a second in-process run must emit identical bytes
    again = _acceptance_report(cfg, criteria)
    same = emit(rep, cfg.format) == emit(again, cfg.format)
    rep.verdicts.append(_check(11, "Determinism", same, {"compared_runs": 2},
                               [] if same else ["two runs produced different reports"]))
    rep.results["criteria"].append(11)
    for v in rep.verdicts:
        rep.stages[f"criterion_{v.criterion}"] = v.seconds
    return rep


COMMANDS: dict[str, Callable[[RunConfig], Report]] = {
    "witt-law": cmd_witt_law,
    "witt-enumerate": cmd_witt_enumerate,
    "hh": cmd_hh,
    "hcminus": cmd_hcminus,
    "dr": cmd_dr,
    "hkr-check": cmd_hkr_check,
    "circle-ext": cmd_circle_ext,
    "cartier": cmd_cartier,
    "fgl": cmd_fgl,
    "all-acceptance": cmd_all_acceptance,
}


def dispatch(cfg: RunConfig) -> Report:
    t0 = time.perf_counter()
    rep = COMMANDS[cfg.command](cfg)
    rep.stages.setdefault("total", time.perf_counter() - t0)
    return rep


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--timings", action="store_true", help="include wall-clock seconds per stage")

    parser = argparse.ArgumentParser(prog="hkrlab", description="Exact Witt vector, Hochschild and Hopf algebra computations.")
    parser.add_argument("--version", action="version", version=f"hkrlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=help)

    s = add("witt-law", "universal Witt addition, multiplication, negation and Frobenius polynomials")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--m", type=int, required=True)

    s = add("witt-enumerate", "kernel of a map on W^(m) of a finite ring")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--ring", help="finite carrier such as F_4 or F_2[e], default F_p")
    s.add_argument("--map", choices=MAP_KINDS, default="frobenius_minus_id")
    s.add_argument("--a", type=int, help="parameter for gp_at")

    s = add("hh", "Hochschild homology in one internal degree")
    s.add_argument("--algebra", required=True)
    s.add_argument("--degree", type=int, required=True, help="internal degree")
    s.add_argument("--window", type=int, default=4, help="highest homological degree")

    s = add("hcminus", "negative cyclic homology modulo u^U")
    s.add_argument("--algebra", required=True)
    s.add_argument("--degree", type=int, required=True, help="internal degree")
    s.add_argument("--U", type=int, default=4, help="u-truncation length")
    s.add_argument("--window", type=int, default=4, help="report degrees -window..window")
    s.add_argument("--model", choices=("bar", "de-rham", "both"), default="bar")

    s = add("dr", "de Rham cohomology and its brutal truncations")
    s.add_argument("--algebra", required=True)
    s.add_argument("--degree", type=int, required=True, help="internal degree")

    s = add("hkr-check", "compare HH_q with Kahler q-forms via antisymmetrization")
    s.add_argument("--algebra", required=True)
    s.add_argument("--q-max", dest="q_max", type=int, default=3)
    s.add_argument("--degree", type=int, default=4, help="largest internal degree")

    s = add("circle-ext", "Ext over the exterior algebra, truncated polynomials, or the tower colimit")
    s.add_argument("--kind", choices=("exterior", "truncated", "tower"), default="exterior")
    s.add_argument("--ring", help="base field, default Q")
    s.add_argument("--N", type=int, help="truncation T^N for --kind truncated")
    s.add_argument("--p", type=int, help="prime for --kind tower")
    s.add_argument("--m", type=int, help="number of tower stages")
    s.add_argument("--window", type=int, default=4, help="largest resolution degree")

    s = add("cartier", "Cartier duality between Witt kernels and alpha_{p^m}, and mu_n with Z/n")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--m", type=int, required=True)

    s = add("fgl", "interpolation formal group law and its distributions")
    s.add_argument("--lam", type=int, default=0)
    s.add_argument("--N", type=int, default=6, help="truncation degree")
    s.add_argument("--ring", help="coefficient ring, default Z")
    s.add_argument("--cartier-p", dest="cartier_p", type=int, help="also compare with Witt kernels at this prime")

    s = add("all-acceptance", "run the acceptance suite")
    s.add_argument("--only", type=int, nargs="+", choices=sorted(CHECKS), help="restrict to these criteria")
    return parser


_CORE = {f for f in RunConfig.__dataclass_fields__} - {"extra", "command"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    args = vars(ns).copy()
    cfg = RunConfig(command=args.pop("command"))
    for k, v in args.items():
        if k in _CORE:
            setattr(cfg, k, v)
        elif v is not None:
            cfg.extra[k] = v
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    cfg = config_from_args(parser.parse_args(argv))
    try:
        rep = dispatch(cfg)
    except ConfigError as exc:
        parser.error(str(exc))
    except BudgetExceeded as exc:
        parser.error(f"{exc} (raise HKRLAB_BUDGET to allow larger slices)")
    except (AlgebraError, NotImplementedError) as exc:
        print(f"hkrlab: error: {exc}", file=sys.stderr)
        return 2
    data = emit(rep, cfg.format)
    if cfg.output:
        with open(cfg.output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return 0 if rep.ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
