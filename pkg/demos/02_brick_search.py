"""Search for bricks and compare the engine settings.

A brick is a partial permutation representation whose open ends are
cement pieces.  The search below lists the brick sizes with one handle of
each type, then reruns one bound under every deduction and pick strategy
to show that they agree.

Run: python3 demos/02_brick_search.py
"""

import time

from brickwork import SearchConfig, emit_dot, find_bricks, load_fixture

p = load_fixture("example2")
res = find_bricks(p.presentation, p.jumpdata, SearchConfig(28, 0))
print(f"example2 up to 28 points: {len(res.bricks)} bricks, {res.nodes} nodes")
for b in res.bricks:
    print(f"    size {b.size:>2}, handles {b.handle_counts}")

forms = {}
for deduce in ("checks-only", "stays", "full"):
    for pick in ("first", "min"):
        t = time.time()
        r = find_bricks(p.presentation, p.jumpdata,
                        SearchConfig(21, 0, deduction=deduce, strategy=pick))
        forms[deduce, pick] = {b.canonical_form() for b in r.bricks}
        print(f"    deduction={deduce:<11} strategy={pick:<5} {len(r.bricks)} bricks, "
              f"{r.nodes:>5} nodes, {time.time() - t:.2f}s")
print("all settings agree:", len({frozenset(f) for f in forms.values()}) == 1)

smallest = min(res.bricks, key=lambda b: b.size)
print()
print(emit_dot(smallest, f"B{smallest.size}"))
