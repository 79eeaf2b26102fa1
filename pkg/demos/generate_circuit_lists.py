"""Generate the two standard circuit families from the bundled designs.

The short family supports linear-inversion tomography: fiducials alone,
fiducial pairs, and one gate between each fiducial pair.  The long family
adds germ powers: short repeated sequences amplify coherent errors, so a
drifting over-rotation shows up loudest in the deepest circuits.
"""

from collections import Counter

from contextdep import lgst_circuits, lsgst_circuits
from contextdep.datasets import drift_design, neighbor_design

short_design = neighbor_design()
short = lgst_circuits(short_design)
print(f"short family from gates {short_design.gates}: {len(short)} circuits, "
      f"max depth {max(c.length for c in short)}")
print("  first few:", ", ".join(c.text for c in short[:8]))

long_design = drift_design()
long_list = lsgst_circuits(long_design)
print()
print(f"long family from gates {long_design.gates}: {len(long_list)} circuits, "
      f"max depth {max(c.length for c in long_list)}")
print(f"  germs: {', '.join(''.join(g) for g in long_design.germs)}")
print(f"  germ-power targets: {long_design.germ_powers}")

by_core = Counter(c.core_length for c in long_list)
print("  circuits per core length:")
for core in sorted(by_core):
    print(f"    L = {core:>3}: {by_core[core]:>4}")

deepest = max(long_list, key=lambda c: c.length)
print(f"  deepest circuit ({deepest.length} gates, core {deepest.core_length}):")
print(f"    {deepest.text}")
