"""The acceptance suite: one check per criterion, each returning a Verdict.

Checks are deterministic.  Wall-clock time is measured but kept out of the
verdict itself so reports stay byte-identical across runs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

from .algebra import parse_algebra
from .circlehopf import (
    AugmentedAlgebra,
    bar_tor_dims,
    cartier_dual_check,
    ext_colimit_tower,
    ext_self,
    hopf_pairing_check,
    mu_hopf,
    mu_z_duality_check,
)
from .exactalg import QQ, PrimeField
from .fgl import gr_matches_divided_powers, interpolation_fgl, multiplicative_matches_intvalued
from .hochschild import comparison_map_check, gr_vs_truncation_check, hkr_check, mixed_vs_de_rham_check
from .witt import build_witt_law, char_zero_fixed_points_check, enumerate_kernel, is_cyclic_group

PASS, FAIL, NOT_VERIFIED = "pass", "fail", "not-verified"


@dataclass
class Verdict:
    criterion: int
    title: str
    status: str
    details: dict = field(default_factory=dict)
    diagnostics: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def __post_init__(self):
        if self.status != PASS and not self.diagnostics:
            self.diagnostics = ["check did not pass; no further detail recorded"]

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "criterion": self.criterion,
            "title": self.title,
            "status": self.status,
            "details": self.details,
            "diagnostics": self.diagnostics,
        }
        if timings:
            out["seconds"] = f"{self.seconds:.3f}"
        return out


def _verdict(n: int, title: str, diagnostics: list[str], details: dict) -> Verdict:
    return Verdict(n, title, PASS if not diagnostics else FAIL, details, diagnostics)


def check_witt_integrality() -> Verdict:
    diag, rows = [], []
    for p in (2, 3, 5):
        for m in range(1, 5):
            law = build_witt_law(p, m)
            ids = law.check_ghost_identities()
            integral = law.is_integral()
            rows.append({"p": p, "m": m, "integral": integral, **ids})
            if not integral:
                diag.append(f"p={p} m={m}: non-integer coefficient")
            diag.extend(f"p={p} m={m}: ghost identity {k} fails" for k, v in ids.items() if not v)
    return _verdict(1, "Witt integrality and ghost naturality", diag, {"laws": rows})


def check_artin_schreier_witt() -> Verdict:
    diag, rows = [], []
    for p in (2, 3):
        for m in (1, 2, 3):
            ker = enumerate_kernel("frobenius_minus_id", PrimeField(p), p, m)
            rows.append({"p": p, "m": m, "count": len(ker), "expected": p**m, "cyclic": is_cyclic_group(ker)})
            if len(ker) != p**m:
                diag.append(f"p={p} m={m}: |ker(F-id)| = {len(ker)}, expected {p ** m}")
    return _verdict(2, "Artin-Schreier-Witt kernel counts", diag, {"counts": rows})


def check_char_zero() -> Verdict:
    diag, rows = [], []
    for p in (2, 3, 5):
        for m in (2, 3):
            r = char_zero_fixed_points_check(p, m)
            rows.append({k: r[k] for k in ("p", "m", "fixed_points_are_diagonal", "kernel_is_first_ghost_coordinate", "witt_coordinates_confirm")})
            if not r["pass"]:
                diag.append(f"p={p} m={m}: fixed points or kernel not as expected")
    return _verdict(3, "Characteristic-zero fixed points are the ghost diagonal", diag, {"cases": rows})


HKR_BASES = ("Q", "F_2", "F_3", "Z")


def check_hkr() -> Verdict:
    diag, rows = [], []
    for base in HKR_BASES:
        for gens in ("x", "x,y"):
            A = parse_algebra(f"{base}[{gens}]")
            for q in range(4):
                for d in range(5):
                    r = hkr_check(A, q, d)
                    hh = r["hh"]
                    rows.append({"algebra": str(A), "q": q, "d": d, "omega": r["omega_rank"], "hh": hh.to_json(), "iso": r["iso"]})
                    if hh.free_rank != r["omega_rank"] or hh.torsion:
                        diag.append(f"{A} q={q} d={d}: HH = {hh}, Omega rank {r['omega_rank']}")
                    if not r["iso"]:
                        diag.append(f"{A} q={q} d={d}: antisymmetrization is not an isomorphism")
    return _verdict(4, "HKR ranks and antisymmetrization isomorphism", diag, {"cells": rows})


def check_mixed_de_rham() -> Verdict:
    diag, rows = [], []
    for text in ("Q[x]", "Q[x,y]"):
        A = parse_algebra(text)
        for q in range(4):
            for d in range(5):
                r = mixed_vs_de_rham_check(A, q, d)
                rows.append({"algebra": text, "q": q, "d": d, "agree": r["agree"], "forms": r["checked"]})
                if not r["agree"]:
                    diag.append(f"{text} q={q} d={d}: [B eps] != [eps d_dR]")
    return _verdict(5, "B corresponds to the de Rham differential", diag, {"cells": rows})


def check_filtered_hc() -> Verdict:
    diag, rows = [], []
    for text in ("Q[x]", "F_3[x]"):
        A = parse_algebra(text)
        for d in range(5):
            r = gr_vs_truncation_check(A, A.nvars + 2, d, range(3))
            for row in r["rows"]:
                rows.append({"algebra": text, "i": row["level"], "d": d, "complete": row["complete"], "match": row["match"],
                             "gr": {str(n): g.to_json() for n, g in row["gr"].items()}})
                if not row["complete"]:
                    diag.append(f"{text} d={d} i={row['level']}: u-truncation too short")
                elif not row["match"]:
                    diag.append(f"{text} d={d} i={row['level']}: gr differs from the truncated de Rham homology")
    return _verdict(6, "Graded pieces of filtered HC^- are truncated de Rham complexes", diag, {"cells": rows})


def check_two_models() -> Verdict:
    diag, rows = [], []
    for text, dmax in (("Q[x]", 4), ("Q[x,y]", 3)):
        A = parse_algebra(text)
        r = comparison_map_check(A, dmax, 4, range(-6, 4))
        if not r["rows"]:
            diag.append(f"{text}: no stable degrees compared")
        for row in r["rows"]:
            rows.append({"algebra": text, "n": row["n"], "d": row["internal_degree"], "bar": row["bar"].to_json(), "de_rham": row["de_rham"].to_json()})
            if not row["equal"]:
                diag.append(f"{text} n={row['n']} d={row['internal_degree']}: {row['bar']} vs {row['de_rham']}")
    return _verdict(7, "Bar and de Rham models of HC^- agree", diag, {"cells": rows})


def check_circle() -> Verdict:
    diag = []
    bound = 4
    L = AugmentedAlgebra.exterior(QQ)
    ext = ext_self(L, bound)
    expected = {(s, 2 * s, -s): 1 for s in range(bound + 1)}
    if dict(ext.dims) != expected:
        diag.append(f"Ext over the exterior algebra is {dict(ext.dims)}")
    if dict(ext.dims) != bar_tor_dims(L, bound):
        diag.append("minimal resolution and bar complex disagree")
    for (s, _, t, _), coords in sorted(ext.products.items()):
        if list(coords) != [1]:
            diag.append(f"u^{s} * u^{t} has coordinates {[str(c) for c in coords]}")
    towers = {}
    for p in (2, 3):
        r = ext_colimit_tower(p, 3)
        towers[str(p)] = {"colimit": r["colimit"], "constant": r["ranks_constant"]}
        if r["colimit"] != {0: 1, 1: 1, 2: 0, 3: 0}:
            diag.append(f"p={p}: colimit dims {r['colimit']}")
        if not r["ranks_constant"]:
            diag.append(f"p={p}: transition ranks not constant along the tower")
    details = {
        "exterior": [{"s": s, "degree": c, "weight": w, "dim": n} for (s, c, w), n in sorted(ext.dims.items())],
        "towers": towers,
    }
    return _verdict(8, "Circle cohomology and the split square-zero colimit", diag, details)


def check_cartier() -> Verdict:
    diag, rows = [], []
    for p in (2, 3):
        for m in (1, 2):
            r = cartier_dual_check(p, m)
            rows.append({"p": p, "m": m, "rank": r["rank"], "verdict": r["verdict"]})
            if r["verdict"] != PASS:
                diag.extend(f"alpha p={p} m={m}: {x}" for x in r["diagnostics"])
            mz = mu_z_duality_check(PrimeField(p), p**m)
            rows.append({"p": p, "m": m, "rank": p**m, "verdict": mz["verdict"], "check": "mu_Z"})
            diag.extend(f"mu p={p} m={m}: {x}" for x in mz["diagnostics"])
    mz = mu_z_duality_check(QQ, 2)
    diag.extend(f"mu over Q: {x}" for x in mz["diagnostics"])
    pair = hopf_pairing_check(mu_hopf(QQ, 2), mu_hopf(QQ, 2), [[1, 1], [1, -1]])
    diag.extend(f"pairing: {x}" for x in pair["diagnostics"])
    return _verdict(9, "Cartier duality", diag, {"checks": rows, "pairing_nondegenerate": pair["nondegenerate"]})


def check_formal_groups() -> Verdict:
    diag = []
    axioms = {}
    for lam in (0, 1, 2, -1):
        r = interpolation_fgl(lam, 6).check_axioms()
        axioms[str(lam)] = all(r.values())
        diag.extend(f"lambda={lam}: {k} fails" for k, v in r.items() if not v)
    mi = multiplicative_matches_intvalued(8)
    diag.extend(f"distributions vs integer-valued: {x}" for x in mi["diagnostics"])
    gr = gr_matches_divided_powers(12)
    if not gr["pass"]:
        diag.append(f"gr vs divided powers mismatches at {gr['mismatches']}")
    return _verdict(10, "Formal group laws, distributions and divided powers", diag,
                    {"axioms": axioms, "multiplicative_N": 8, "divided_powers_N": 12})


CHECKS: dict[int, Callable[[], Verdict]] = {
    1: check_witt_integrality,
    2: check_artin_schreier_witt,
    3: check_char_zero,
    4: check_hkr,
    5: check_mixed_de_rham,
    6: check_filtered_hc,
    7: check_two_models,
    8: check_circle,
    9: check_cartier,
    10: check_formal_groups,
}

# soft wall-clock limits in seconds, enforced by the test suite
TIME_LIMITS = {1: 30, 2: 10, 3: 5, 4: 120, 5: 120, 6: 60, 7: 180, 8: 60, 9: 60, 10: 60}


def run_check(n: int) -> Verdict:
    t0 = time.perf_counter()
    try:
        v = CHECKS[n]()
    except Exception as exc:  # a crash is a failed criterion, not a crashed suite
        v = Verdict(n, CHECKS[n].__name__, FAIL, {}, [f"{type(exc).__name__}: {exc}"])
    v.seconds = time.perf_counter() - t0
    return v


def run_all(criteria=None) -> list[Verdict]:
    return [run_check(n) for n in (criteria or sorted(CHECKS))]
