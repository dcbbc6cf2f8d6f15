"""
Finding a simple cylinder through the slit
==========================================

Start from the genus-3 builtin and let the renormalisation loop look for a
simple cylinder containing the slit.  Each step of the trace says whether
the triangle above the slit already gave a cylinder or had to be cut.
"""

from hypslit import SlitSurface, builtin, nps_find_simple_cylinder, parallelogram_decomposition
from hypslit.nps import nps_iterations

s, beta = builtin("hyp4")
cert, trace = nps_find_simple_cylinder(SlitSurface(s, beta))

for step in trace:
    print(step)
print("shear-and-cut steps:", nps_iterations(trace), "of at most", s.dim_c - 2)
print("core curve", cert.boundary.holonomy, "area", cert.area)

# repeat until the surface is a torus; the areas add back up
pieces = parallelogram_decomposition(s, None, beta)
print(len(pieces), "parallelograms, total area", sum(p.area for p in pieces), "=", s.area())
