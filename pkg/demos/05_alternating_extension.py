"""Certify an alternating group from a subgroup that is alternating on part of the points.

The circle (B, B, B, A) has 88 points.  A commutator word w acts trivially
on the 16-point bricks and non-trivially on the 40-point one, so the
subgroup generated by w and three of its conjugates lives on a subset Y.
If that subgroup is alternating on Y, fixes everything else, and every
generator of the group moves some point of Y, the whole group contains
the alternating group.

Run: python3 demos/05_alternating_extension.py
"""

from brickwork import (Placement, SearchConfig, alternating_extension_check, build_mosaic,
                       contains_alternating, derive_groupoid_relators, evaluate_word,
                       find_bricks, load_fixture, make_circle_instruction)
from brickwork.permanalysis import is_identity, support

p = load_fixture("example4")
d = p.jumpdata
rels = derive_groupoid_relators(d, p.presentation)
found = {b.size: b for b in find_bricks(p.presentation, d, SearchConfig(40, 0)).bricks}
bricks = {"B": found[16], "A": found[40]}
for key, b in bricks.items():
    pl = Placement((key,))
    g1 = build_mosaic({key: b}, pl, make_circle_instruction({key: b}, pl, d, "c1", rels),
                      d, p.presentation).perm_group()
    print(f"{key} on {b.size} points closed on itself: w1 trivial: "
          f"{is_identity(evaluate_word(g1, '(ebcbed)^2'))}")

pl = Placement(("B", "B", "B", "A"))
m = build_mosaic(bricks, pl, make_circle_instruction(bricks, pl, d, "c1", rels), d,
                 p.presentation)
g = m.perm_group()
w = "(ebcbed)^2 (abcdec)^5 ((ebcbed)^2)^-1 ((abcdec)^5)^-1"
us = [w] + [f"{x} {w} {x}" for x in "abc"]
Y = sorted(set().union(*[support(evaluate_word(g, u)) for u in us]))
rep = alternating_extension_check(g, us, Y)
print(f"mosaic on {m.degree} points, |Y| = {len(Y)}, order of U on Y = {rep.order_on_y}")
print(f"U fixes the rest: {rep.fixes_outside}, alternating on Y: {rep.alternating_on_y}, "
      f"generators meet Y: {rep.generators_meet_y}")
print(f"conclusion: {rep.verdict}; Jordan test agrees: {contains_alternating(g).verdict}")
