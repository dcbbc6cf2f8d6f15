"""Exact translation surfaces with a slit, hyperelliptic involutions and simple cylinders."""

from .geometry import GeometryError, Mat2, Vec2, rat
from .surface import (
    SaddleConnection,
    SlitSurface,
    Surface,
    builtin,
    builtin_slit,
    from_parallelogram_chain,
    random_chain,
    slit,
)
from .involution import Involution, cut_and_glue, find_involution
from .enumeration import (
    CylinderCert,
    enumerate_saddle_connections,
    simple_cylinders_containing,
    triangles_with_side,
)
from .flows import flow, horocycle, normalize_slit_horizontal, teichmuller
from .nps import NPSError, nps_find_simple_cylinder, parallelogram_decomposition, successions

__all__ = [
    "GeometryError", "Mat2", "Vec2", "rat",
    "SaddleConnection", "SlitSurface", "Surface", "builtin", "builtin_slit",
    "from_parallelogram_chain", "random_chain", "slit",
    "Involution", "cut_and_glue", "find_involution",
    "CylinderCert", "enumerate_saddle_connections", "simple_cylinders_containing",
    "triangles_with_side",
    "flow", "horocycle", "normalize_slit_horizontal", "teichmuller",
    "NPSError", "nps_find_simple_cylinder", "parallelogram_decomposition", "successions",
]
