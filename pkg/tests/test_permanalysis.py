import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from brickwork.permanalysis import (CONTAINS_ALT, IS_ALT, IS_SYM, NO_CERTIFICATE, DegreeSets,
                                    NotTransitive, PermGroup, alternating_extension_check,
                                    check_certificate, contains_alternating, evaluate_slp,
                                    evaluate_word, exact_threshold, group_order, is_identity,
                                    is_primitive, minimal_block_system, mul, orbits,
                                    realizable_degrees, stabilizer_chain)

from oracles import all_group_elements, naive_degrees


def random_group(rng, n, k=2, sparse=False):
    gens = []
    for _ in range(k):
        if sparse:
            p = list(range(n))
            a, b = rng.sample(range(n), 2)
            p[a], p[b] = p[b], p[a]
            c = rng.randrange(n)
            d = rng.randrange(n)
            p[c], p[d] = p[d], p[c]
        else:
            p = list(range(n))
            rng.shuffle(p)
        gens.append(p)
    return PermGroup(n, tuple(gens))


def _orbits_from_elements(elems, n):
    orb = {}
    for i in range(n):
        o = tuple(sorted({e[i] + 1 for e in elems}))
        orb[o] = True
    return sorted(orb)


def _is_block_system(elems, blocks):
    sets = [frozenset(b) for b in blocks]
    for e in elems:
        for b in sets:
            img = frozenset(e[p - 1] + 1 for p in b)
            if img not in sets:
                return False
    return True


SMALL = [
    ("S4", 4, [[(1, 2, 3, 4)], [(1, 2)]]),
    ("D8 on square", 4, [[(1, 2, 3, 4)], [(1, 3)]]),
    ("A5", 5, [[(1, 2, 3, 4, 5)], [(1, 2, 3)]]),
    ("C2 wr C3", 6, [[(1, 2)], [(1, 3, 5), (2, 4, 6)]]),
    ("S3 x S3 on 6", 6, [[(1, 2, 3)], [(1, 2)], [(4, 5, 6)], [(4, 5)]]),
    ("PGL(2,5) on 6", 6, [[(1, 2, 3, 4, 5)], [(1, 6), (2, 5), (3, 4)], [(2, 3, 5, 4)]]),
    ("S7", 7, [[(1, 2, 3, 4, 5, 6, 7)], [(1, 2)]]),
    ("AGL(1,7)", 7, [[(1, 2, 3, 4, 5, 6, 7)], [(2, 4, 3, 7, 5, 6)]]),
    ("C2 wr S4 on 8", 8, [[(1, 2)], [(1, 3, 5, 7), (2, 4, 6, 8)], [(1, 3), (2, 4)]]),
]


@pytest.mark.parametrize("name,n,cycles", SMALL, ids=[s[0] for s in SMALL])
def test_against_element_enumeration(name, n, cycles):
    g = PermGroup.from_cycles(n, cycles)
    elems = all_group_elements(g.gens, n)
    assert group_order(g) == len(elems)
    assert orbits(g) == _orbits_from_elements(elems, n)
    if len(orbits(g)) > 1:
        return
    bl = minimal_block_system(g)
    if bl is not None:
        assert _is_block_system(elems, bl)
        assert 1 < len(bl[0]) < n
    else:
        # no block of size 2..n-1 through point 1 and any other point is preserved
        for size in range(2, n):
            if n % size:
                continue
            for other in range(2, n + 1):
                blocks = _orbit_blocks(elems, {1, other}, n)
                assert blocks is None or len(blocks[0]) == n
    for e in list(elems)[:50]:
        assert stabilizer_chain(g).contains(np.array(e))


def _orbit_blocks(elems, seed, n):
    """The smallest block containing ``seed``, found by closing under the group."""
    block = frozenset(seed)
    while True:
        grown = set(block)
        for e in elems:
            img = frozenset(e[p - 1] + 1 for p in block)
            if img & block and img != block:
                grown |= img
        if grown == block:
            break
        block = frozenset(grown)
    imgs = {frozenset(e[p - 1] + 1 for p in block) for e in elems}
    return sorted(sorted(b) for b in imgs)


def test_random_orders_match_enumeration():
    rng = random.Random(11)
    for _ in range(30):
        n = rng.randrange(3, 8)
        g = random_group(rng, n, rng.randrange(1, 3), sparse=rng.random() < 0.5)
        elems = all_group_elements(g.gens, n)
        assert group_order(g) == len(elems)
        assert orbits(g) == _orbits_from_elements(elems, n)
        stab = stabilizer_chain(g)
        rng2 = np.random.default_rng(1)
        for _ in range(20):
            p = rng2.permutation(n)
            assert stab.contains(p) == (tuple(int(v) for v in p) in elems)


def test_orders_match_sympy():
    sympy = pytest.importorskip("sympy.combinatorics")
    rng = random.Random(4)
    for _ in range(25):
        n = rng.randrange(6, 16)
        g = random_group(rng, n, rng.randrange(1, 4), sparse=rng.random() < 0.6)
        ref = sympy.PermutationGroup([sympy.Permutation(list(map(int, p))) for p in g.gens])
        assert group_order(g) == ref.order()
        assert (len(orbits(g)) == 1) == ref.is_transitive()
        if ref.is_transitive():
            assert is_primitive(g) == ref.is_primitive()


def test_randomized_chain_hits_target():
    n = 10
    g = PermGroup.from_cycles(n, [[tuple(range(1, 11))], [(1, 2)]])
    assert group_order(g, target=math.factorial(10)) == math.factorial(10)


@pytest.mark.parametrize("n", range(5, 13))
def test_alt_order_cross_check(n):
    # odd n: an n-cycle and a 3-cycle; even n: an (n-1)-cycle on 2..n and a 3-cycle
    if n % 2:
        cyc = tuple(range(1, n + 1))
    else:
        cyc = tuple(range(2, n + 1))
    g = PermGroup.from_cycles(n, [[cyc], [(1, 2, 3)]])
    res = contains_alternating(g)
    assert res.verdict == IS_ALT
    assert check_certificate(g, res.certificate)
    assert group_order(g) == math.factorial(n) // 2
    assert group_order(g, target=math.factorial(n) // 2) == math.factorial(n) // 2


def test_sym_verdict():
    g = PermGroup.from_cycles(7, [[tuple(range(1, 8))], [(1, 2)]])
    assert contains_alternating(g).verdict == IS_SYM


def test_no_false_positive_on_imprimitive_or_small():
    # AGL(1,7) is primitive but holds no usable prime cycle
    g = PermGroup.from_cycles(7, [[tuple(range(1, 8))], [(2, 4, 3, 7, 5, 6)]])
    assert contains_alternating(g, attempts=300).verdict == NO_CERTIFICATE
    w = PermGroup.from_cycles(6, [[(1, 2)], [(1, 3, 5), (2, 4, 6)]])
    assert contains_alternating(w).verdict == NO_CERTIFICATE
    # PSL(2,7) on 8 points: 7-cycles exist but 7 > 8-3
    # x -> x+1 and x -> -1/x on the projective line over GF(7), infinity as point 8
    psl = PermGroup.from_cycles(8, [[(1, 2, 3, 4, 5, 6, 7)], [(1, 8), (2, 7), (3, 4), (5, 6)]])
    assert group_order(psl) == 168
    assert contains_alternating(psl, attempts=400).verdict == NO_CERTIFICATE


def test_not_transitive_raises():
    g = PermGroup.from_cycles(5, [[(1, 2)], [(3, 4, 5)]])
    with pytest.raises(NotTransitive):
        contains_alternating(g)


def test_certificate_slp_replays():
    rng = random.Random(9)
    g = random_group(rng, 12, 2)
    res = contains_alternating(g)
    assert res.verdict in (IS_ALT, IS_SYM)
    c = res.certificate
    p = evaluate_slp(g, c.slp, c.index)
    assert len(p) == 12
    assert check_certificate(g, c)


alph_words = st.lists(st.integers(0, 3), max_size=15)


@settings(max_examples=60, deadline=None)
@given(alph_words, st.integers(0, 1000))
def test_word_times_inverse_is_identity(w, seed):
    rng = random.Random(seed)
    g = random_group(rng, 9, 2)
    a, b = g.gens
    g4 = PermGroup(9, (a, b, np.argsort(a), np.argsort(b)), ("a", "b", "A", "B"))
    inverse_of = {0: 2, 1: 3, 2: 0, 3: 1}
    back = [inverse_of[x] for x in reversed(w)]
    assert is_identity(evaluate_word(g4, list(w) + back))
    assert is_identity(evaluate_word(g4, []))


def test_evaluate_word_left_to_right():
    g = PermGroup.from_cycles(3, [[(1, 2)], [(2, 3)]], ("a", "b"))
    ab = evaluate_word(g, ["a", "b"])
    # 1 -a-> 2 -b-> 3
    assert int(ab[0]) == 2
    assert np.array_equal(ab, mul(g.gens[0], g.gens[1]))


@settings(max_examples=40, deadline=None)
@given(st.sets(st.integers(1, 40), max_size=4), st.sets(st.integers(1, 40), max_size=4),
       st.sets(st.integers(1, 40), max_size=4))
def test_degrees_match_naive_summation(a1, a2, a12):
    rep = realizable_degrees(DegreeSets.of(a1, a2, a12), 200)
    assert set(rep.achievable) == naive_degrees(a1, a2, a12, 200)
    if rep.threshold is not None:
        assert all(N in rep.achievable for N in range(rep.threshold, 201))
        if rep.threshold > 1:
            # the threshold is sharp within the classes the minima describe
            assert max(rep.class_minima.values()) == rep.bound


def test_degrees_example3_values():
    rep = realizable_degrees(DegreeSets.of({6, 7, 9, 10, 12, 13}, None,
                                           {12, 15, 18, 21, 22}), 40)
    assert all(N in rep.achievable for N in range(12, 41))
    assert 11 not in rep.achievable
    assert exact_threshold(rep, set(range(1, 11)) - {5}) == 12


def test_degrees_coin_problem():
    rep = realizable_degrees(DegreeSets.of((), (), {28, 57}), 200)
    assert 113 in rep.achievable
    want = {28 * i + 57 * j for i in range(8) for j in range(4)} - {0}
    assert set(rep.achievable) == {v for v in want if v <= 200}


def test_degrees_unit_and_empty():
    rep = realizable_degrees(DegreeSets.of((), (), {1}), 30)
    assert set(rep.achievable) == set(range(1, 31))
    assert rep.threshold == 1
    rep = realizable_degrees(DegreeSets.of({3}, {4}, ()), 30)
    assert set(rep.achievable) == {7} and rep.modulus is None


def _alt_on(points, n):
    pts = list(points)
    k = len(pts)
    cyc = tuple(pts) if k % 2 else tuple(pts[1:])
    return [PermGroup.from_cycles(n, [[cyc]]).gens[0],
            PermGroup.from_cycles(n, [[tuple(pts[:3])]]).gens[0]]


def test_extension_check_positive():
    # S_9 generated by a 9-cycle and a transposition; U = Alt on {1..6}
    n = 9
    g = PermGroup.from_cycles(n, [[tuple(range(1, 10))], [(1, 2)]], ("a", "b"))
    rep = alternating_extension_check(g, _alt_on(range(1, 7), n), range(1, 7))
    assert rep.applies and rep.verdict == CONTAINS_ALT
    assert rep.order_on_y == math.factorial(6) // 2
    assert group_order(g) >= math.factorial(9) // 2


def test_extension_check_each_hypothesis_can_fail():
    n = 10
    g = PermGroup.from_cycles(n, [[tuple(range(1, 11))], [(1, 2)], [(8, 9)]], ("a", "b", "c"))
    # U moves a point outside Y
    rep = alternating_extension_check(g, _alt_on(range(1, 7), n) + [
        PermGroup.from_cycles(n, [[(1, 7)]]).gens[0]], range(1, 7))
    assert not rep.fixes_outside and not rep.applies
    # U is too small on Y: a single 5-cycle
    rep = alternating_extension_check(g, [PermGroup.from_cycles(n, [[(1, 2, 3, 4, 5)]]).gens[0]],
                                      range(1, 7))
    assert rep.fixes_outside and not rep.alternating_on_y
    assert rep.order_on_y == 5
    # c moves all of Y = {1..5} off Y
    h = PermGroup.from_cycles(n, [[tuple(range(1, 11))], [(1, 2)],
                                  [(1, 6), (2, 7), (3, 8), (4, 9), (5, 10)]], ("a", "b", "c"))
    rep = alternating_extension_check(h, _alt_on(range(1, 6), n), range(1, 6))
    assert rep.alternating_on_y and not rep.generators_meet_y
    assert rep.failing_generator == "c"
    assert not rep.applies


def test_extension_conclusion_matches_order():
    rng = random.Random(3)
    checked = 0
    for _ in range(40):
        n = rng.randrange(7, 11)
        gens = [PermGroup.from_cycles(n, [[tuple(range(1, n + 1))]]).gens[0]]
        p = list(range(n))
        a, b = rng.sample(range(n), 2)
        p[a], p[b] = p[b], p[a]
        gens.append(np.array(p))
        g = PermGroup(n, tuple(gens), ("a", "b"))
        Y = sorted(rng.sample(range(1, n + 1), 5))
        try:
            rep = alternating_extension_check(g, _alt_on(Y, n), Y)
        except ValueError:
            continue  # U is not inside g
        if rep.applies:
            checked += 1
            assert group_order(g) in (math.factorial(n) // 2, math.factorial(n))
    assert checked > 0
