import random

import numpy as np
import pytest

from brickwork.brickfinder import SearchConfig, run_search
from brickwork.fileformats import fixture_path, load_brick, load_fixture
from brickwork.jumpdata import derive_groupoid_relators
from brickwork.mosaic import (ConstructionInstruction, InstructionError, Mosaic, Placement,
                              build_mosaic, connectivity_graph, cycle_string, handle_index_sets,
                              make_circle_instruction, mosaic_from_json, mosaic_to_json,
                              parse_cycles, verify_instruction, verify_mosaic)
from brickwork.permanalysis import minimal_block_system, orbits

from oracles import TINY


@pytest.fixture(scope="module")
def ext():
    p = load_fixture("example2ext")
    b = load_brick(fixture_path("brick14.json"), p.presentation, p.jumpdata)
    return p, b


@pytest.fixture(scope="module")
def m42(ext):
    p, b = ext
    rels = derive_groupoid_relators(p.jumpdata, p.presentation)
    pl = Placement(("B", "B", "B"))
    inst = make_circle_instruction({"B": b}, pl, p.jumpdata, "c1", rels)
    return build_mosaic({"B": b}, pl, inst, p.jumpdata, p.presentation)


def test_circle_of_three(m42, ext):
    p, _ = ext
    assert m42.degree == 42
    assert verify_mosaic(m42, p.presentation) == []
    assert len(orbits(m42.perm_group())) == 1
    assert connectivity_graph(m42).connected
    assert [s for s, _ in m42.blocks] == [1, 15, 29]


def test_42_is_imprimitive(m42):
    bl = minimal_block_system(m42.perm_group())
    assert bl is not None
    assert len({len(b) for b in bl}) == 1


def test_inside_brick_entries_copied(m42, ext):
    _, b = ext
    for lam in range(3):
        off = 14 * lam
        for w in range(1, 15):
            for x in range(3):
                v = b.image(w, x)
                if v is not None:
                    assert m42.image(off + w, x) == off + v


def _with_phi(m, phi):
    return Mosaic(m.alphabet, m.degree, m.blocks, tuple(phi), m.provenance)


@pytest.mark.parametrize("seed", range(10))
def test_fault_injection_detected(m42, ext, seed):
    p, _ = ext
    rng = random.Random(seed)
    phi = [x.copy() for x in m42.phi]
    x = rng.randrange(3)
    a, b = rng.sample(range(42), 2)
    phi[x][a], phi[x][b] = phi[x][b], phi[x][a]
    assert verify_mosaic(_with_phi(m42, phi), p.presentation)


def test_non_bijection_detected(m42, ext):
    p, _ = ext
    phi = [x.copy() for x in m42.phi]
    phi[0][0] = phi[0][1]
    bad = verify_mosaic(_with_phi(m42, phi), p.presentation)
    assert bad and bad[0].kind == "bijection"


def test_wrong_domain_raises(ext):
    p, b = ext
    d = p.jumpdata
    sets = handle_index_sets({"B": b}, Placement(("B", "B")), d)
    inst = ConstructionInstruction({c: {(0, 1): (0, 1)} for c in range(len(d.cement))})
    with pytest.raises(InstructionError):
        verify_instruction(inst, sets, d, ())


def test_circle_needs_single_handles():
    p = TINY["modular"]()
    bricks = [b for b in run_search(p.presentation, p.jumpdata, SearchConfig(6, 0))
              if b.handle_counts == (2,)]
    with pytest.raises(InstructionError):
        make_circle_instruction({"B": bricks[0]}, Placement(("B",)), p.jumpdata, "c1")


def test_json_roundtrip(m42, ext):
    p, _ = ext
    back = mosaic_from_json(mosaic_to_json(m42), p.presentation)
    assert back.degree == 42
    for a, b in zip(back.phi, m42.phi):
        assert np.array_equal(a, b)


def test_cycle_notation_roundtrip():
    rng = np.random.default_rng(3)
    for _ in range(20):
        p = rng.permutation(9)
        assert list(parse_cycles(cycle_string(p), 9)) == list(p)


def _random_instruction(rng, d, sets, bar, force=None):
    maps = {}
    for c in range(len(d.cement)):
        if c in maps:
            continue
        dom, cod = list(sets.domain(c)), list(sets.domain(bar[c]))
        img = cod[:]
        rng.shuffle(img)
        if force is not None:
            img = force(c, dom, img, rng)
        maps[c] = dict(zip(dom, img))
        if bar[c] != c:
            maps[bar[c]] = {v: k for k, v in maps[c].items()}
    return ConstructionInstruction(maps)


def _random_involution(c, dom, img, rng):
    pts = dom[:]
    rng.shuffle(pts)
    out = {}
    while pts:
        a = pts.pop()
        if pts and rng.random() < 0.7:
            b = pts.pop()
            out[a], out[b] = b, a
        else:
            out[a] = a
    return [out[k] for k in dom]


def _check_property(p, bricks, placement, rng, force, rounds):
    d = p.jumpdata
    rels = derive_groupoid_relators(d, p.presentation)
    sets = handle_index_sets(bricks, placement, d)
    passed = failed = 0
    for _ in range(rounds):
        f = force if rng.random() < 0.6 else None
        inst = _random_instruction(rng, d, sets, d.cement.bar, f)
        ok = not verify_instruction(inst, sets, d, rels)
        m = build_mosaic(bricks, placement, inst, d, p.presentation, verify=False)
        # the mosaic is a representation exactly when the instruction is valid
        assert (verify_mosaic(m, p.presentation) == []) == ok
        passed += ok
        failed += not ok
    return passed, failed


def test_random_instructions_free_groupoid():
    p = TINY["modular"]()
    bricks = {}
    for b in run_search(p.presentation, p.jumpdata, SearchConfig(6, 0)):
        bricks.setdefault(b.handle_counts, b)
    placement = Placement(tuple(sorted(bricks)) * 2)
    bricks = {k: v for k, v in bricks.items()}
    passed, failed = _check_property(p, bricks, placement, random.Random(1),
                                     _random_involution, 200)
    assert passed > 20 and failed > 20


def _order_three(c, dom, img, rng):
    pts = dom[:]
    rng.shuffle(pts)
    out = {}
    while len(pts) >= 3:
        a, b, e = pts.pop(), pts.pop(), pts.pop()
        out[a], out[b], out[e] = b, e, a
    for a in pts:
        out[a] = a
    return [out[k] for k in dom]


def test_random_instructions_cyclic_groupoid():
    p = load_fixture("example2")
    bricks = {b.size: b for b in run_search(p.presentation, p.jumpdata, SearchConfig(21, 0))
              if b.handle_counts == (1,)}
    placement = Placement((14, 14, 21, 14, 21, 21))
    rng = random.Random(2)
    d = p.jumpdata
    rels = derive_groupoid_relators(d, p.presentation)
    sets = handle_index_sets(bricks, placement, d)
    passed = failed = 0
    for _ in range(300):
        maps = {}
        z = dict(zip(sets.domain(0), _order_three(0, list(sets.domain(0)), None, rng)))
        if rng.random() < 0.4:
            a, b = rng.sample(list(z), 2)
            z[a], z[b] = z[b], z[a]
        maps[0] = z
        # j(c3)j(c1) and the bar pairs fix the rest from ζ(c1)
        inv = {v: k for k, v in z.items()}
        maps[1] = inv
        maps[2] = inv if rng.random() < 0.8 else z
        maps[3] = {v: k for k, v in maps[2].items()}
        inst = ConstructionInstruction(maps)
        ok = not verify_instruction(inst, sets, d, rels)
        m = build_mosaic(bricks, placement, inst, d, p.presentation, verify=False)
        assert (verify_mosaic(m, p.presentation) == []) == ok
        passed += ok
        failed += not ok
    assert passed > 30 and failed > 30
