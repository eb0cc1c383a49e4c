"""End-to-end acceptance criteria, each printing one pass/fail line with its wall time."""
import json
import os
import random
import time

import pytest

import oracles as O
from vvalla.experiments import runner
from vvalla.experiments.checks import (CHECKS, FAIL, PASS, SKIPPED, UNSTABLE, RunConfig, Session,
                                       deficient_length)
from vvalla.experiments.corpus import bundled_corpus_path, load_corpus
from vvalla.kernel import monomial
from vvalla.kernel.ideal import IdealHandle
from vvalla.kernel.ring import Polynomial, PolyRing

P = O.P
CHECK_FNS = dict(CHECKS)


def report_line(record, n, ok, seconds, note=""):
    line = f"criterion {n}: {'pass' if ok else 'fail'} ({seconds:.1f}s){' ' + note if note else ''}"
    record("criterion", line)
    print("\n" + line)


@pytest.fixture(scope="module")
def corpus():
    return load_corpus(bundled_corpus_path())


@pytest.fixture(scope="module")
def session():
    return Session(RunConfig())


def run_group(name, corpus, session):
    out = []
    for entry in corpus.entries:
        if not entry.model.cohen_macaulay:
            continue
        for v in CHECK_FNS[name](entry, session):
            out.append((entry.key, v))
    return out


def bad(verdicts):
    return [(k, v) for k, v in verdicts if v["status"] not in (PASS, SKIPPED)]


# -- 1. kernel soundness ---------------------------------------------------------

def _rand_poly(rng, ring, n, homogeneous):
    d = rng.randint(1, 3)
    degs = [d] if homogeneous else list(range(d + 1))
    monos = [e for k in degs for e in O.monomials_of_degree(n, k)]
    terms = {e: rng.randint(1, P - 1) for e in rng.sample(monos, min(len(monos), rng.randint(1, 3)))}
    return terms, Polynomial(ring, terms)


def _kernel_instance(rng, homogeneous):
    n = rng.choice((2, 3))
    ring = PolyRing(("x", "y", "z")[:n])
    gens = [_rand_poly(rng, ring, n, homogeneous) for _ in range(rng.randint(1, 3))]
    h = IdealHandle(ring, [g for _, g in gens])
    gb = h.groebner()
    assert IdealHandle(ring, gb).groebner() == gb
    gbd = [dict(g.terms) for g in gb]
    assert O.is_groebner(gbd)
    for t, _ in gens:
        assert not O.divide_remainder(t, gbd)
    combo = sum((_rand_poly(rng, ring, n, False)[1] * g for _, g in gens), Polynomial(ring, {}))
    assert h.contains(combo)
    if homogeneous:
        raw = [t for t, _ in gens]
        for g in gbd:
            assert O.homogeneous_member(g, raw, n, (1,) * n)
        t, f = _rand_poly(rng, ring, n, True)
        assert h.contains(f) == O.homogeneous_member(t, raw, n, (1,) * n)


def test_criterion_1_kernel_soundness(record_property):
    start = time.perf_counter()
    rng = random.Random(20240)
    for k in range(200):
        _kernel_instance(rng, homogeneous=k % 2 == 0)
    count = 0
    # every monomial ideal with finite colength is the complement of a finite down-set
    for n, D in ((1, 7), (2, 7), (3, 3)):
        for std in O.down_sets(n, D):
            if std:
                gens = O.ideal_of_down_set(std, n)
                assert monomial.count_standard(gens, n) == len(std)
                count += 1
    box = random.Random(8)
    ring = PolyRing(("x", "y", "z"))
    for _ in range(150):
        gens = [tuple(box.randint(1, 8) if i == j else 0 for i in range(3)) for j in range(3)]
        for _ in range(box.randint(0, 4)):
            e = [0, 0, 0]
            for _ in range(box.randint(2, 8)):
                e[box.randrange(3)] += 1
            gens.append(tuple(e))
        h = IdealHandle(ring, [Polynomial(ring, {g: 1}) for g in gens])
        assert h.colength() == O.brute_monomial_colength(gens, 3, 9)
        count += 1
    elapsed = time.perf_counter() - start
    report_line(record_property, 1, elapsed < 60, elapsed, f"200 GB instances, {count} monomial ideals")
    assert elapsed < 60


# -- 2-6. corpus-level checks -------------------------------------------------------

def test_corpus_shape(corpus, session):
    keys = {e.key for e in corpus.entries}
    assert len(keys) >= 6
    assert {"ring1.m", "ring1.sq", "ring1.d0", "ring2.m"} <= keys
    depths = {session.depth(e).depth for e in corpus.entries}
    assert {0, 1, 2} <= depths


@pytest.mark.parametrize("n,group,limit", [
    (2, "vv_criterion", 300),
    (3, "koszul", 300),
    (4, "main_theorem", 600),
    (5, "containment", 600),
    (6, "powers", 900),
])
def test_criteria_2_to_6(corpus, session, n, group, limit, record_property):
    start = time.perf_counter()
    verdicts = run_group(group, corpus, session)
    elapsed = time.perf_counter() - start
    failures = bad(verdicts)
    passed = sum(v["status"] == PASS for _, v in verdicts)
    report_line(record_property, n, not failures and passed and elapsed < limit, elapsed,
                f"{passed} verdicts pass across {len(corpus.entries)} entries")
    assert not failures, json.dumps(failures, indent=1)
    assert passed
    assert elapsed < limit


def test_criterion_4_covers_deficient_entries(corpus, session):
    seen = {k for k, v in run_group("main_theorem", corpus, session)
            if v["check"] == "ann_m_primary" and v["status"] == PASS}
    deficient = {e.key for e in corpus.entries if deficient_length(e, session) is not None}
    assert deficient == {"ring1.d0", "ring1.d1", "ring2.d0"}
    assert deficient <= seen


def test_criterion_6_covers_deficient_entries(corpus, session):
    rows = [(k, v) for k, v in run_group("powers", corpus, session) if v["check"] == "running_intersection"]
    ls = {(k, v["detail"]["l"]) for k, v in rows if v["status"] == PASS}
    assert {(k, l) for k in ("ring1.d0", "ring1.d1", "ring2.d0") for l in (1, 2, 3)} <= ls


# -- 7. honesty invariants -----------------------------------------------------------

VALUE_KEYS = {"ideal", "verdict", "dim", "annihilator", "annihilator_verdict", "total_length",
              "trace", "dims_by_t", "running_intersection"}


def unstable_leaks(obj, path="$"):
    """Paths where an unstabilized record still carries a computed value."""
    out = []
    if isinstance(obj, dict):
        if obj.get("status") in (UNSTABLE, "unstabilized") and "entry" not in obj and "check" not in obj:
            out.extend(f"{path}.{k}" for k in VALUE_KEYS & set(obj))
        for k, v in obj.items():
            out.extend(unstable_leaks(v, f"{path}.{k}"))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            out.extend(unstable_leaks(v, f"{path}[{i}]"))
    return out


def test_criterion_7_honesty(tmp_path, record_property):
    start = time.perf_counter()
    with open(bundled_corpus_path(), encoding="utf-8") as fh:
        text = fh.read()
    cheap = ("ring1.sq", "ring2.d0", "ring3.m")
    runs = [
        ("gb", RunConfig(), "both"),
        ("depth-g", RunConfig(), "json"),
        ("vv", RunConfig(samples=3), "both"),
        ("ann", RunConfig(samples=3), "json"),
        ("ar", RunConfig(samples=12, window=2), "both"),
        # a window longer than the sample budget can never stabilize
        ("ar", RunConfig(samples=4, window=40, only=cheap), "json"),
        ("q", RunConfig(only=cheap), "both"),
        ("powers", RunConfig(samples=6, window=2, only=("ring2.d0",)), "json"),
    ]
    statuses = []
    for command, config, fmt in runs:
        run_dir, report, status = runner.run_corpus(text, command, config, str(tmp_path), fmt)
        statuses.append(status)
        assert not unstable_leaks(report), (command, unstable_leaks(report))
        with open(os.path.join(run_dir, "report.json"), encoding="utf-8") as fh:
            assert fh.read() == runner.dump_json(report)
        if status == UNSTABLE:
            assert runner.exit_code(status) == 3
        same, _ = runner.replay(run_dir)
        assert same, (command, run_dir)
    assert statuses[5] == UNSTABLE and FAIL not in statuses
    elapsed = time.perf_counter() - start
    report_line(record_property, 7, True, elapsed, f"{len(runs)} manifests replayed byte-identically")
