"""The GL2+ action on surfaces, with the horocycle and Teichmuller flows.

Rotations would leave the rationals, so a slit is made horizontal with a
rotation-scaling instead and the area scale is returned alongside.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .geometry import (
    GeometryError,
    Mat2,
    RatLike,
    align_to_horizontal,
    dilation_matrix,
    horocycle_matrix,
    rat,
)
from .surface import HalfEdge, SlitSurface, Surface

SurfaceLike = Union[Surface, SlitSurface]


@dataclass(frozen=True)
class FlowParams:
    """Horocycle time ``s`` and Teichmuller dilation ``lam`` (standing for e^t)."""

    s: Fraction = Fraction(0)
    lam: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "s", rat(self.s))
        object.__setattr__(self, "lam", rat(self.lam))
        if self.lam <= 0:
            raise GeometryError("dilation factor must be positive")

    def matrix(self) -> Mat2:
        # dilate after shearing
        return dilation_matrix(self.lam) @ horocycle_matrix(self.s)


def apply_matrix(s: SurfaceLike, m: Mat2) -> SurfaceLike:
    """Act by m on every edge vector; combinatorics and involution are kept."""
    if isinstance(s, SlitSurface):
        return SlitSurface(s.surface.apply_matrix(m), s.slit)
    return s.apply_matrix(m)


def horocycle(s: SurfaceLike, time: RatLike) -> SurfaceLike:
    return apply_matrix(s, horocycle_matrix(time))


def teichmuller(s: SurfaceLike, lam: RatLike) -> SurfaceLike:
    return apply_matrix(s, dilation_matrix(lam))


def flow(s: SurfaceLike, params: FlowParams) -> SurfaceLike:
    return apply_matrix(s, params.matrix())


def normalize_slit_horizontal(s: SurfaceLike, beta: HalfEdge = None) -> tuple:
    """Make the edge ``beta`` point along +x.

    Returns ``(surface, scale)`` where ``scale = |beta|^2`` is the factor by
    which areas were multiplied (lengths by its square root).
    """
    if isinstance(s, SlitSurface):
        beta = s.slit if beta is None else tuple(beta)
        surf = s.surface
    else:
        if beta is None:
            raise GeometryError("no slit given")
        surf = s
    v = surf.edge(tuple(beta))
    m = align_to_horizontal(v)
    return apply_matrix(s, m), m.det()
