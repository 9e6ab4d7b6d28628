"""Instrumented structural claims behind the stretch bounds.

Each test samples at least 500 pairs over several seeded graphs and asserts
zero counterexamples. Claims whose premise is rare on uniform pairs (bunches
meeting, a far midpoint pivot) also draw pairs at small distance.
"""
import random

import numpy as np
import pytest

from distoracle.container import build_oracle
from distoracle.exact import apsp
from distoracle.graph import random_graph
from support import (lemma_borderline_unweighted, lemma_borderline_weighted, lemma_bunch_dichotomy,
                     lemma_disjoint_budget, lemma_level_descent, lemma_middle_vertex, lemma_prefix_exact,
                     lemma_weighted_disjoint, sample_pairs, soft_log)

SEEDS = range(4)


def near_pairs(D, count, rng, radius):
    n = D.shape[0]
    out = []
    while len(out) < count:
        u = rng.randrange(n)
        close = np.flatnonzero((D[u] > 0) & (D[u] <= radius))
        if len(close):
            out.append((u, int(close[rng.randrange(len(close))])))
    return out


def add(total, r):
    total[0] += r[0]
    total[1] += r[1]


@pytest.fixture(scope="module")
def unweighted():
    out = []
    for s in SEEDS:
        g = random_graph(150, 450, 1, seed=200 + s)
        out.append((s, g, apsp(g, keep_parents=True)))
    return out


@pytest.fixture(scope="module")
def weighted():
    return [(s, random_graph(120, 360, 10, seed=100 + s)) for s in SEEDS]


def test_level_descent_dichotomy(unweighted):
    rng = random.Random(1)
    total = [0, 0]
    for s, g, E in unweighted:
        for k in (3, 4):
            o = build_oracle(g, "tz", k=k, seed=s)
            add(total, lemma_level_descent(o, E.dist, sample_pairs(g.n, 150, rng)))
    soft_log(f"level descent: {total}")
    assert total[0] >= 500 and total[1] == 0


@pytest.mark.parametrize("tag", ["borderline-a", "borderline-b", "borderline-c"])
def test_borderline_weighted_pivot_radius(weighted, tag):
    rng = random.Random(2)
    first, second = [0, 0], [0, 0]
    pairs_seen = 0
    for s, g in weighted:
        o = build_oracle(g, tag, seed=s)
        E = apsp(o.g, keep_parents=True)
        pairs = sample_pairs(g.n, 200, rng)
        pairs_seen += len(pairs)
        r1, r2 = lemma_borderline_weighted(o, E, pairs)
        add(first, r1)
        add(second, r2)
    soft_log(f"{tag}: h_c(tau) {first}, next level {second}")
    assert pairs_seen >= 500
    assert first[0] > 0 and first[1] == 0
    assert second[1] == 0


def test_bunch_meet_exact_and_disjoint_radius(unweighted):
    rng = random.Random(3)
    meet, disj = [0, 0], [0, 0]
    for s, g, E in unweighted:
        o = build_oracle(g, "u-av", t=3, seed=s)
        pairs = sample_pairs(g.n, 150, rng) + near_pairs(E.dist, 300, rng, 1)
        m, d, _ = lemma_bunch_dichotomy(o, E.dist, pairs)
        add(meet, m)
        add(disj, d)
    soft_log(f"bunch dichotomy: meet {meet}, disjoint {disj}")
    assert meet[0] >= 100 and meet[1] == 0
    assert disj[0] >= 500 and disj[1] == 0


@pytest.mark.parametrize("tag", ["q3", "q4"])
def test_borderline_unweighted_plus_two(unweighted, tag):
    rng = random.Random(4)
    first, second = [0, 0], [0, 0]
    for s, g, E in unweighted:
        o = build_oracle(g, tag, seed=s)
        a, b = lemma_borderline_unweighted(o, E.dist, E, sample_pairs(g.n, 200, rng))
        add(first, a)
        add(second, b)
    soft_log(f"{tag}: tau' radius {first}, next level {second}")
    assert first[0] >= 500 and first[1] == 0
    assert second[1] == 0


@pytest.mark.parametrize("tag", ["q3", "q4"])
def test_middle_vertex_trichotomy(unweighted, tag):
    rng = random.Random(5)
    cnt = {"a": [0, 0], "b": [0, 0], "c": [0, 0]}
    for s, g, E in unweighted:
        o = build_oracle(g, tag, seed=s)
        pairs = sample_pairs(g.n, 150, rng) + near_pairs(E.dist, 300, rng, 1)
        r = lemma_middle_vertex(o, E.dist, E, pairs)
        for key in cnt:
            add(cnt[key], r[key])
    soft_log(f"{tag}: middle vertex {cnt}")
    assert cnt["a"][0] >= 100
    assert cnt["b"][0] >= 500 and cnt["c"][0] > 0
    assert all(v[1] == 0 for v in cnt.values())


@pytest.mark.parametrize("t", [2, 3])
def test_unweighted_prefix_exact_and_budget(unweighted, t):
    rng = random.Random(6)
    pre, bud = [0, 0], [0, 0]
    for s, g, E in unweighted:
        o = build_oracle(g, "u-av", t=t, seed=s)
        pairs = sample_pairs(g.n, 150, rng)
        add(pre, lemma_prefix_exact(o, E, pairs, t))
        add(bud, lemma_disjoint_budget(o, E, pairs, t, False))
    soft_log(f"U-AV t={t}: prefix {pre}, budget {bud}")
    assert pre[0] >= 500 and pre[1] == 0
    assert bud[0] > 0 and bud[1] == 0


@pytest.mark.parametrize("tag,t", [("w-aa", 3), ("w-av", 2)])
def test_weighted_near_structure(weighted, tag, t):
    rng = random.Random(7)
    pre, bud, disj = [0, 0], [0, 0], [0, 0]
    size_bad = 0
    for s, g in weighted:
        o = build_oracle(g, tag, t=t, seed=s)
        E = apsp(o.g, keep_parents=True)
        pairs = sample_pairs(o.g.n, 150, rng)
        add(pre, lemma_prefix_exact(o, E, pairs, t))
        add(bud, lemma_disjoint_budget(o, E, pairs, t, True))
        r, sb = lemma_weighted_disjoint(o, E.dist, pairs)
        add(disj, r)
        size_bad += sb
    soft_log(f"{tag}: prefix {pre}, budget {bud}, disjoint B* {disj}, size bad {size_bad}")
    assert pre[0] >= 500 and pre[1] == 0
    assert bud[0] > 0 and bud[1] == 0
    assert disj[0] > 0 and disj[1] == 0
    assert size_bad == 0
