import copy
import random

import pytest

from brickwork.brickfinder import (BrickInvariantError, PartialCosetTable, SearchAborted,
                                   SearchConfig, extract_brick, find_bricks, run_search,
                                   verify_brick)
from brickwork.fileformats import brick_from_json, brick_to_json, load_fixture, load_brick
from brickwork.fileformats import fixture_path

from oracles import TINY, brute_force_bricks, engine_form


@pytest.fixture(scope="module")
def ex2ext():
    return load_fixture("example2ext")


@pytest.fixture(scope="module")
def brick14(ex2ext):
    return load_brick(fixture_path("brick14.json"), ex2ext.presentation, ex2ext.jumpdata)


def test_golden_brick_is_valid(brick14, ex2ext):
    assert verify_brick(brick14, ex2ext.presentation, ex2ext.jumpdata) == []
    assert brick14.shape == (14, (1, 1))
    assert brick14.cement_cell(0, 1) == (1, 0)


def _relabel(doc, perm, swap_copies=False):
    """Rename rows by ``perm`` (1-based dict), keeping everything else."""
    out = copy.deepcopy(doc)
    inv = {v: k for k, v in perm.items()}
    rows = []
    for new in range(1, len(doc["table"]) + 1):
        old = doc["table"][inv[new] - 1]
        rows.append([perm[e] if isinstance(e, int) else e for e in old])
    out["table"] = rows
    return out


def test_canonical_form_ignores_row_names(brick14, ex2ext):
    doc = brick_to_json(brick14)
    rng = random.Random(5)
    for _ in range(20):
        order = list(range(1, brick14.size + 1))
        rng.shuffle(order)
        perm = {old: new for old, new in zip(range(1, brick14.size + 1), order)}
        other = brick_from_json(_relabel(doc, perm), ex2ext.presentation, ex2ext.jumpdata)
        assert other.canonical_form() == brick14.canonical_form()


def test_json_roundtrip(brick14, ex2ext):
    back = brick_from_json(brick_to_json(brick14), ex2ext.presentation, ex2ext.jumpdata)
    assert back.cells == brick14.cells


def test_search_finds_golden_brick(brick14, ex2ext):
    cfg = SearchConfig(bound=14, initial_cement=ex2ext.jumpdata.cement.index("c1"))
    res = find_bricks(ex2ext.presentation, ex2ext.jumpdata, cfg)
    forms = {b.canonical_form() for b in res.bricks}
    assert brick14.canonical_form() in forms
    for b in res.bricks:
        assert verify_brick(b, ex2ext.presentation, ex2ext.jumpdata) == []


@pytest.mark.parametrize("name,bound", [("modular", 5), ("cyclic-pair", 4), ("modular-two", 5)])
def test_matches_exhaustive_enumeration(name, bound):
    p = TINY[name]()
    want = brute_force_bricks(p, bound, seed=0)
    got = {engine_form(b, p.jumpdata) for b in
           run_search(p.presentation, p.jumpdata, SearchConfig(bound=bound, initial_cement=0))}
    assert got == want


def test_low_index_matches_exhaustive_enumeration():
    p = TINY["modular"]()
    want = brute_force_bricks(p, 6, seed=None)
    got = {engine_form(b, None) for b in
           run_search(p.presentation, None, SearchConfig(bound=6))}
    assert got == want


@pytest.mark.parametrize("deduction", ["checks-only", "stays", "full"])
@pytest.mark.parametrize("strategy", ["first", "min"])
def test_engine_settings_agree(deduction, strategy):
    p = load_fixture("example2")
    cfg = SearchConfig(bound=21, initial_cement=0, deduction=deduction, strategy=strategy)
    forms = {b.canonical_form() for b in run_search(p.presentation, p.jumpdata, cfg)}
    base = {b.canonical_form() for b in run_search(
        p.presentation, p.jumpdata, SearchConfig(bound=21, initial_cement=0))}
    assert forms == base


def test_dedup_modes_nest():
    p = TINY["modular"]()
    counts = {}
    for mode in ("all", "canonical", "invariants"):
        cfg = SearchConfig(bound=5, initial_cement=0, dedup=mode)
        counts[mode] = len(list(run_search(p.presentation, p.jumpdata, cfg)))
    assert counts["all"] >= counts["canonical"] >= counts["invariants"] >= 1


def test_parallel_agrees_with_serial():
    p = load_fixture("example2")
    serial = {b.canonical_form() for b in run_search(
        p.presentation, p.jumpdata, SearchConfig(bound=21, initial_cement=0))}
    par = {b.canonical_form() for b in run_search(
        p.presentation, p.jumpdata, SearchConfig(bound=21, initial_cement=0, jobs=2))}
    assert par == serial


def test_node_budget_aborts():
    p = load_fixture("example2")
    with pytest.raises(SearchAborted):
        find_bricks(p.presentation, p.jumpdata,
                    SearchConfig(bound=40, initial_cement=0, max_nodes=50))


def test_bound_hit_flag():
    p = TINY["modular"]()
    res = find_bricks(p.presentation, p.jumpdata, SearchConfig(bound=3, initial_cement=0))
    assert res.bound_hit
    p = load_fixture("example1")
    # a single point has no room for the stay words
    res = find_bricks(p.presentation, p.jumpdata, SearchConfig(bound=1, initial_cement=0))
    assert res.bricks == []


def test_low_index_needs_no_data():
    p = load_fixture("example3-n12")
    sizes = {b.size for b in run_search(p.presentation, None, SearchConfig(bound=4))}
    # the (2,3,12) triangle group has transitive actions of degree 1, 2, 3 and 4
    assert sizes == {1, 2, 3, 4}


def test_seed_needs_data():
    p = load_fixture("example1")
    with pytest.raises(ValueError):
        run_search(p.presentation, None, SearchConfig(bound=5, initial_cement=0))


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(bound=0)
    with pytest.raises(ValueError):
        SearchConfig(bound=5, dedup="nope")
    with pytest.raises(ValueError):
        SearchConfig(bound=5, strategy="nope")


def test_on_node_sees_sound_tables():
    p = load_fixture("example2")
    seen = []

    def look(t):
        seen.append(len(t.check_invariants()))

    find_bricks(p.presentation, p.jumpdata, SearchConfig(bound=21, initial_cement=0),
                on_node=look)
    assert seen and not any(seen)


def _table(brick, pres, data):
    rows = []
    for w in range(1, brick.size + 1):
        row = []
        for x in range(brick.ngens):
            e = brick.entry(w, x)
            row.append(e if isinstance(e, int) else (e.piece, e.copy))
        rows.append(row)
    return PartialCosetTable.from_rows(pres, data, rows)


def test_invariant_checks_catch_faults(brick14, ex2ext):
    pres, data = ex2ext.presentation, ex2ext.jumpdata
    t = _table(brick14, pres, data)
    assert t.check_invariants() == []
    assert extract_brick(t, data, pres).cells == brick14.cells

    broken = _table(brick14, pres, data)
    broken.cells[2 * broken.ng + 2] = 9  # row 3, t: breaks pair symmetry
    assert any("symmetry" in m for m in broken.check_invariants())
    with pytest.raises(BrickInvariantError):
        extract_brick(broken, data, pres)

    moved = _table(brick14, pres, data)
    s = pres.alphabet.index("s")
    code = moved.cells[0 * moved.ng + s]
    moved.cells[0 * moved.ng + s], moved.cells[0 * moved.ng + 2] = moved.cells[0 * moved.ng + 2], code
    assert moved.check_invariants()


def test_undo_restores_state():
    p = load_fixture("example2")
    t = PartialCosetTable.for_data(p.presentation, p.jumpdata, 10)
    before = (list(t.cells), t.n_rows, t.defined, dict(t.loc))
    mark = len(t.trail)
    t.add_row()
    t.set_point(1, 2, 2)
    t.set_cement(2, 0, 0, 1)
    assert t.check_invariants() == []
    t.undo(mark)
    assert (t.cells, t.n_rows, t.defined, t.loc) == (before[0], before[1], before[2], before[3])
