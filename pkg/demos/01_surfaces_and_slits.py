"""
Building a slit surface and looking at its saddle connections
=============================================================

A surface here is a list of triangles with exact rational edge vectors.
We build one from a chain of parallelograms, find the hyperelliptic
involution, and list the short saddle connections.
"""

from collections import Counter

from hypslit import (
    SlitSurface,
    builtin,
    enumerate_saddle_connections,
    find_involution,
    from_parallelogram_chain,
)

# three parallelograms glued in a chain give genus 2 with one zero of order 2
s = from_parallelogram_chain([((1, 0), (0, 1)), ((0, 1), (2, 1)), ((2, 1), (1, 1))])
print("stratum", s.stratum(), "area", s.area())

# the builtin version comes with a slit already marked
s, beta = builtin("hyp2")
tau = find_involution(s, beta)
print("slit", s.edge(beta), "fixed by involution:", tau.fixes_edge(s, beta))

# saddle connections up to length 5, grouped by squared length
res = enumerate_saddle_connections(SlitSurface(s, beta), 25)
by_len = Counter(c.holonomy.norm_sq() for c in res)
for n in sorted(by_len):
    print(f"|v|^2 = {n}: {by_len[n]}")
