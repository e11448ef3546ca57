"""Glue bricks into permutation representations and study the resulting groups.

Three copies of the 14-point brick form a 42-point circle.  Two 28-point
bricks and one 57-point brick of another group form a 113-point circle
whose group contains the alternating group.

Run: python3 demos/03_mosaics.py
"""

from brickwork import (Placement, SearchConfig, build_mosaic, contains_alternating,
                       derive_groupoid_relators, find_bricks, group_order, load_fixture,
                       make_circle_instruction, minimal_block_system, orbits, verify_mosaic)
from brickwork.fileformats import fixture_path, load_brick


def circle(problem, bricks, names, piece="c1"):
    d = problem.jumpdata
    rels = derive_groupoid_relators(d, problem.presentation)
    pl = Placement(tuple(names))
    inst = make_circle_instruction(bricks, pl, d, piece, rels)
    return build_mosaic(bricks, pl, inst, d, problem.presentation)


p = load_fixture("example2ext")
b14 = load_brick(fixture_path("brick14.json"), p.presentation, p.jumpdata)
m = circle(p, {"B": b14}, "BBB")
g = m.perm_group()
blocks = minimal_block_system(g)
print(f"circle of three 14-point bricks: {m.degree} points, "
      f"relators hold: {verify_mosaic(m, p.presentation) == []}, orbits: {len(orbits(g))}")
print(f"    order {group_order(g)}, blocks of size {len(blocks[0])}")

p = load_fixture("example1")
found = {}
for bound in (28, 57):
    for b in find_bricks(p.presentation, p.jumpdata, SearchConfig(bound, 0)).bricks:
        if b.handle_counts == (1, 1):
            found.setdefault(b.size, b)
bricks = {"S": found[28], "L": found[57]}
m = circle(p, bricks, ["S", "S", "L"])
g = m.perm_group()
alt = contains_alternating(g)
print(f"circle of 28 + 28 + 57 points: {m.degree} points, "
      f"relators hold: {verify_mosaic(m, p.presentation) == []}, "
      f"primitive: {minimal_block_system(g) is None}")
print(f"    {alt.verdict}, witnessed by a {alt.certificate.prime}-cycle")
