"""Search for counterexamples to the isoholonomic inequality on random closed loops.

Every loop is built from seeded Hermitian generators with profiles that
vanish at both ends. Its length is compared with the bound of its
holonomy, allowing a step-doubling estimate of the mesh error.
"""

import sys

from isoholonomic import check_loop, random_closed_loop

loops = int(sys.argv[1]) if len(sys.argv) > 1 else 200
worst = None
for seed in range(loops):
    dim, rank = 4 + seed % 3, 1 + (seed // 3) % 3
    chk = check_loop(random_closed_loop(dim, rank, seed=seed, steps=2000))
    if chk.violated:
        print(f"violation at seed {seed}: length {chk.length} < bound {chk.bound}")
    if worst is None or chk.margin < worst[1].margin:
        worst = (seed, chk)

seed, chk = worst
print(f"{loops} loops checked; tightest seed {seed}: length {chk.length:.6f}, bound {chk.bound:.6f}, margin {chk.margin:.3g}")

# a loop that retraces itself has trivial holonomy and bound 0
chk = check_loop(random_closed_loop(4, 2, generator_count=1, seed=0))
print(f"retraced loop: bound {chk.bound:.1e}, length {chk.length:.4f}")
