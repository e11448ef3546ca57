import itertools
import json

import pytest

from brickwork.fileformats import load_fixture, parse_problem_file
from brickwork.jumpdata import (IncompatibleJumpData, JumpDataError, Stay, close_stays,
                                derive_groupoid_relators, factorize_shift,
                                format_groupoid_relator, validate_jump_data)
from brickwork.presentation import positions


def relator_strings(name):
    p = load_fixture(name)
    return {format_groupoid_relator(p.jumpdata, r)
            for r in derive_groupoid_relators(p.jumpdata, p.presentation)}


def test_example1_data():
    p = load_fixture("example1")
    d = p.jumpdata
    assert len(d.cement) == 2
    assert len(d.stays) == 4  # already closed under inverse
    assert d.handles.classes == ((0,), (1,))
    assert relator_strings("example1") == {"j(c1)j(c2)"}


def test_example2_relators_up_to_rotation():
    published = ["j(c2)j(c2)j(c2)", "j(c4)j(c4)j(c4)", "j(c1)j(c1)j(c1)",
                 "j(c3)j(c3)j(c3)", "j(c4)j(c2)", "j(c3)j(c1)"]
    got = relator_strings("example2")
    assert len(got) == len(published)

    def rot_class(s):
        parts = s.replace(")j(", " ").strip("j()").split()
        return {tuple(parts[k:] + parts[:k]) for k in range(len(parts))}

    got_classes = [frozenset(rot_class(s)) for s in got]
    for s in published:
        assert frozenset(rot_class(s)) in got_classes, s


def test_example3_single_class():
    p = load_fixture("example3-n12")
    assert len(p.jumpdata.handles) == 1
    assert p.jumpdata.cement.bar == (0,)


def _brute_factorizations(data, r, c, k):
    """All factorisations of a shift by stay tokens, found without the greedy rule."""
    from brickwork.presentation import cyclic_shift

    rk = cyclic_shift(r, k)
    xi, bar = data.cement.xi, data.cement.bar
    out = []

    def rec(cur, pos, acc):
        remaining = rk[pos:] + rk[:1]
        for st in data.stays_from(bar[cur]):
            tok = st.word + (xi[st.end],)
            if tuple(remaining[:len(tok)]) != tok:
                continue
            if len(tok) == len(remaining):
                if st.end == c:
                    out.append(acc + [(cur, st.word)])
            elif len(tok) < len(remaining):
                rec(st.end, pos + len(tok), acc + [(cur, st.word)])

    rec(c, 1, [])
    return out


@pytest.mark.parametrize("name", ["example1", "example2", "example2ext", "example3-n12",
                                  "example4"])
def test_factorisations_unique_and_match_brute_force(name):
    p = load_fixture(name)
    d = p.jumpdata
    for r in p.presentation.relators:
        for c in range(len(d.cement)):
            for k in positions(d.cement.xi[c], r):
                all_ = _brute_factorizations(d, r, c, k)
                assert len(all_) == 1
                assert factorize_shift(d, r, c, k) == all_[0]


def _doc(**kw):
    doc = {"generators": [["s", "r"], ["t", "t"]], "relators": ["s^3", "t^2", "(st)^7"],
           "cement": [{"name": "c1", "bar": "c2", "xi": "t"},
                      {"name": "c2", "bar": "c1", "xi": "t"}],
           "stays": [["c1", "ststs", "c1"], ["c2", "stststs", "c2"]]}
    doc.update(kw)
    return json.dumps(doc)


def test_missing_stays_make_data_incompatible():
    p = parse_problem_file(_doc(stays=[["c1", "ststs", "c1"]]))
    with pytest.raises(IncompatibleJumpData) as ei:
        derive_groupoid_relators(p.jumpdata, p.presentation)
    assert "no stay from" in str(ei.value)


def test_closure_required_when_disabled():
    with pytest.raises(JumpDataError) as ei:
        parse_problem_file(_doc(close_stays=False))
    assert "lacks its inverse" in str(ei.value)


def test_prefix_conflict_rejected():
    with pytest.raises(JumpDataError) as ei:
        parse_problem_file(_doc(stays=[["c1", "s", "c1"], ["c1", "st", "c1"]]))
    assert ei.value.kind == "consistency"


def test_xi_must_respect_bar():
    with pytest.raises(JumpDataError):
        parse_problem_file(_doc(cement=[{"name": "c1", "bar": "c2", "xi": "t"},
                                        {"name": "c2", "bar": "c1", "xi": "s"}], stays=[]))


def test_unreduced_stay_word_rejected():
    with pytest.raises(JumpDataError):
        parse_problem_file(_doc(stays=[["c1", "sr", "c1"]]))


def test_close_stays_is_idempotent():
    p = load_fixture("example2")
    d = p.jumpdata
    again = close_stays(d.alphabet, [(s.start, s.word, s.end) for s in d.stays])
    assert again == d.stays
    assert validate_jump_data(d.alphabet, d.cement, again) == d


def test_handle_types_are_stay_components():
    p = load_fixture("example2ext")
    d = p.jumpdata
    for a, b in itertools.combinations(range(len(d.cement)), 2):
        linked = any({s.start, s.end} == {a, b} for s in d.stays)
        if linked:
            assert d.handles.class_of[a] == d.handles.class_of[b]
    assert all(isinstance(s, Stay) for s in d.stays)
