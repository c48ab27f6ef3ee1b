"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line (shown even
under output capture) and then asserts the verdict.
"""

from __future__ import annotations

import json
import time

import pytest

from mgsheaves import zlattice as zl
from mgsheaves.bmp import DegreeBoundPolicy, bmp, bmp_family, verify_w0_pullback
from mgsheaves.cli import main
from mgsheaves.fixtures import double_label_graph
from mgsheaves.hecke import kl_table
from mgsheaves.momentgraph import DOWN, UP, gkm_check
from mgsheaves.sheaf import check_f_projective, skyscraper, stalk_rank_poly, structure_algebra
from mgsheaves.suites import (
    hom_family,
    self_duality_family,
    suite_adjunction,
    suite_f_projective,
    suite_open_sections,
    suite_verma_flag,
)

from conftest import block

SMALL = [("A", 1), ("A", 2)]
REGULAR = [("A", 1), ("A", 2), ("B", 2), ("A", 3)]


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, detail: str = "") -> None:
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else ""))
        assert ok, f"criterion {n} failed: {detail}"
    return emit


def test_criterion_01_kl_equals_bmp_rank(report):
    bad, pairs, times = [], 0, []
    for key in REGULAR:
        g = block(*key)
        t0 = time.perf_counter()
        table = kl_table(g.block.group)
        for w, r in enumerate(bmp_family(g, DOWN)):
            for x in range(len(g)):
                pairs += 1
                rank = len(r.sheaf.stalk_shifts[x])
                if rank != table.at_one(g.names[x], g.names[w]):
                    bad.append((key, g.names[w], g.names[x]))
        times.append(f"{key[0]}{key[1]} {time.perf_counter() - t0:.1f}s")
    report(1, not bad, f"{pairs} pairs, mismatches {bad[:3]}; " + ", ".join(times))


def test_criterion_02_first_nontrivial_multiplicity(a3, report):
    r = bmp(a3, DOWN, "s2s1s3s2")
    graded = stalk_rank_poly(r.sheaf, "e")
    rank = len(r.sheaf.stalk_shifts[a3.index["e"]])
    report(2, rank == 2 and graded == {0: 1, 1: 1}, f"rank {rank}, graded {graded}")


def test_criterion_03_pullback(report):
    results = {f"{k[0]}{k[1]}": verify_w0_pullback(block(*k)).ok for k in [("A", 1), ("A", 2), ("B", 2)]}
    report(3, all(results.values()), str(results))


def test_criterion_04_structure_algebra_a1(a1, report):
    dims, _ = structure_algebra(a1, range(0, 11, 2))
    dims = list(dims)
    report(4, dims == [1, 2, 2, 2, 2, 2], f"dims {dims}")


def test_criterion_05_adjunction_and_open_sections(report):
    verdicts = {}
    for key in SMALL:
        g = block(*key)
        verdicts[f"{key[0]}{key[1]}"] = (suite_adjunction(g).ok, suite_open_sections(g, top=12).ok)
    report(5, all(a and b for a, b in verdicts.values()), f"(adjunction, open sets) {verdicts}")


def test_criterion_06_f_projectivity(report):
    verdicts, times = {}, []
    for key in REGULAR:
        t0 = time.perf_counter()
        verdicts[f"{key[0]}{key[1]}"] = suite_f_projective(block(*key)).ok
        times.append(f"{key[0]}{key[1]} {time.perf_counter() - t0:.1f}s")
    report(6, all(verdicts.values()), f"{verdicts}; " + ", ".join(times))


def test_criterion_07_verma_flag_agreement(report):
    verdicts = {f"{k[0]}{k[1]}": suite_verma_flag(block(*k)).ok for k in SMALL}
    report(7, all(verdicts.values()), str(verdicts))


def test_criterion_08_self_duality(report):
    fits = {}
    for key in SMALL:
        g = block(*key)
        for d in (UP, DOWN):
            fam = self_duality_family(g, d)
            fits[f"{key[0]}{key[1]} {d}"] = (fam["ok"], fam["intercept"], fam["slope"])
    ok = all(v[0] and abs(v[2]) == 2 for v in fits.values())
    report(8, ok, "(ok, intercept, slope) " + str(fits))


def test_criterion_09_hom_correspondence(report):
    a2 = block("A", 2)
    fam = hom_family(a2, solver_degrees=3)
    a3 = block("A", 3)
    spot = zl.verify_hom_correspondence(a3, "s1s3", "s1s2s1s3s2s1")
    spot_ok = spot.matched and spot.left_total == spot.right_total == 2
    report(9, fam["ok"] and len(fam["cases"]) == 36 and spot_ok,
           f"A2 36 pairs ok={fam['ok']} slope={fam['slope']}; A3 spot totals "
           f"{spot.left_total}/{spot.right_total} sigma={spot.sigma}")


def test_criterion_10_negative_controls(report):
    gkm = gkm_check(double_label_graph())
    g = block("A", 2)
    sky = check_f_projective(skyscraper(g, "s1"), UP, 8)
    a3 = block("A", 3)
    trunc = bmp(a3, DOWN, "s2s1s3s2", DegreeBoundPolicy(degree_cap=2))
    checks = {"gkm fails with witness": not gkm.ok and gkm.witness is not None,
              "skyscraper not F-projective": not sky.ok,
              "truncated cap flagged": not trunc.saturated}
    report(10, all(checks.values()), str(checks))


def test_criterion_11_determinism(capsys, report):
    runs = []
    for _ in range(2):
        code = main(["verify", "--type", "A", "--rank", "2", "--suite", "all", "--format", "json"])
        runs.append((code, capsys.readouterr().out))
    same = runs[0][1] == runs[1][1]
    ok = same and runs[0][0] == 0 and json.loads(runs[0][1])["ok"]
    report(11, ok, f"byte-identical={same}, exit={runs[0][0]}, {len(runs[0][1])} bytes")
