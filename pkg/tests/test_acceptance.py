"""One test per acceptance criterion, each reporting a single PASS/FAIL line."""
import time

import pytest

from annular_webs import complex as cx
from annular_webs.cli import SUITES
from annular_webs.rings import LaurentQA
from oracles import khovanov_homology, skein_euler


@pytest.fixture
def report(record_property, capsys):
    def emit(number, title, ok, seconds, detail=""):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {title} ({seconds:.1f}s){' ' + detail if detail else ''}"
        record_property("acceptance", line)
        with capsys.disabled():
            print("\n" + line)
        return ok
    return emit


def run_suite(name, **kwargs):
    rep = SUITES[name](**kwargs)
    return rep, f"{len(rep.results) - len(rep.failures)}/{len(rep.results)} instances"


def suite_criterion(report, number, title, name, limit, **kwargs):
    rep, detail = run_suite(name, **kwargs)
    ok = rep.ok and rep.seconds < limit
    report(number, title, ok, rep.seconds, detail)
    assert rep.ok, rep.failures[:5]
    assert rep.seconds < limit


def test_criterion_01_matching_counts(report):
    suite_criterion(report, 1, "|B^n| = C(2n,n) for n <= 6", "matchings", 1, max_n=6)


def test_criterion_02_h1_table(report):
    suite_criterion(report, 2, "H^1 basis and multiplication table", "table", 1)


def test_criterion_03_algebra_axioms(report):
    suite_criterion(report, 3, "associativity and unit, exhaustive n <= 2, 10^4 triples n = 3",
                    "axioms", 120, max_n=2, samples=10000, random_n=3)


def test_criterion_04_frobenius(report):
    suite_criterion(report, 4, "symmetric trace, counit laws, Gram nondegeneracy n <= 2", "frobenius", 60, max_n=2)


def test_criterion_05_degree_one_generation(report):
    suite_criterion(report, 5, "degree-one certificates for every basis element n <= 3", "generation", 120, max_n=3)


def test_criterion_06_relations(report):
    suite_criterion(report, 6, "relation list n <= 3", "relations", 60, max_n=3)


def test_criterion_07_bimodule_composition(report):
    suite_criterion(report, 7, "composition isomorphisms and twist invariance", "bimodule", 300, random_pairs=20)


def test_criterion_08_annular_homology(report):
    start = time.perf_counter()
    rep, detail = run_suite("homology")
    # disk-contained Hopf link against the brute-force oracle and the skein recursion
    hopf_ok = True
    for sign in (1, -1):
        d = cx.hopf_link(sign)
        crossings, edges = d.pd_data()
        got = {(h, q): v for (h, q, a), v in cx.homology(d).items()}
        in_disk = all(a == 0 for (_, _, a) in cx.homology(d))
        hopf_ok &= in_disk and got == khovanov_homology(crossings, edges)
        hopf_ok &= cx.euler_characteristic(d) == skein_euler(crossings, edges)
    q = LaurentQA.monomial(1, 0) + LaurentQA.monomial(-1, 0)
    a = LaurentQA.monomial(0, 1) + LaurentQA.monomial(0, -1)
    ranks_ok = (cx.cube(cx.unknot()).graded_ranks() == {0: q}
                and cx.cube(cx.essential_unknot()).graded_ranks() == {0: a})
    seconds = time.perf_counter() - start
    ok = rep.ok and hopf_ok and ranks_ok and seconds < 600
    report(8, "unknots, Reidemeister corpus, Hopf link vs oracle and skein", ok, seconds, detail)
    assert rep.ok, rep.failures[:5]
    assert hopf_ok and ranks_ok
    assert seconds < 600


def test_criterion_09_sl3_bijection(report):
    suite_criterion(report, 9, "M o G = id and G o M = id for length <= 5", "bijection", 300, max_len=5)


def test_criterion_10_counting(report):
    suite_criterion(report, 10, "basis counts, hull formula, honeycomb 3, 15, 93", "counting", 120, max_len=6)


def test_criterion_11_growth_and_confluence(report):
    start = time.perf_counter()
    growth, g_detail = run_suite("growth", max_len=5)
    confluence, c_detail = run_suite("confluence", count=200)
    seconds = time.perf_counter() - start
    ok = growth.ok and confluence.ok and seconds < 300
    report(11, "growth order independence, non-ellipticity, confluence on 200 webs", ok, seconds,
           f"growth {g_detail}, confluence {c_detail}")
    assert growth.ok, growth.failures[:5]
    assert confluence.ok, confluence.failures[:5]
    assert seconds < 300
