"""Load jump data (checked on load) and list the relators it imposes on the cement groupoid.

Run: python3 demos/01_jump_data.py
"""

from brickwork import derive_groupoid_relators, load_fixture
from brickwork.jumpdata import format_groupoid_relator

for name in ("example1", "example2", "example2ext"):
    p = load_fixture(name)
    d = p.jumpdata
    print(f"{name}: {len(d.cement)} cement pieces, {len(d.stays)} stays, "
          f"{len(d.handles)} handle type(s)")
    # every relator of the group, read through the stays, becomes a loop of cement jumps
    for r in derive_groupoid_relators(d, p.presentation):
        print("   ", format_groupoid_relator(d, r))
