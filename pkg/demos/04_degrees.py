"""Which degrees can be reached by gluing bricks, and from where on is every degree reached.

Bricks with one handle of each type (sizes A1) close a chain at its ends;
bricks with two handles (sizes A12) extend it.  The coin-problem bound tells
where the gaps stop, and a low-index search fills in the degrees below it.

Run: python3 demos/04_degrees.py
"""

from brickwork import DegreeSets, SearchConfig, find_bricks, load_fixture, realizable_degrees
from brickwork.permanalysis import exact_threshold

p = load_fixture("example3-n12")
bricks = find_bricks(p.presentation, p.jumpdata, SearchConfig(22, 0)).bricks
a1 = {b.size for b in bricks if b.handle_counts == (1,)}
a12 = {b.size for b in bricks if b.handle_counts == (2,)}
rep = realizable_degrees(DegreeSets.of(a1, a12=a12), 40)
print(f"A1 = {sorted(a1)}, A12 = {sorted(a12)}")
print(f"class minima mod {rep.modulus}: {rep.class_minima}")
print(f"every degree from {rep.threshold} on is reached by gluing")
print(f"gaps up to 40: {rep.missing()}")

low = find_bricks(p.presentation, p.jumpdata, SearchConfig(rep.threshold - 1, None))
degrees = sorted({b.size for b in low.bricks})
print(f"transitive actions of degree below {rep.threshold}: {degrees}")
print(f"M = {exact_threshold(rep, degrees)}")
