"""Independent brute-force references, written without the package's kernels."""

from collections import Counter
from fractions import Fraction
from math import isqrt

HALF = Fraction(1, 2)


def _frac(q):
    return q - (q.numerator // q.denominator)


def slit_torus_holonomies(L_sq):
    """Canonical holonomies on the unit square torus with marked points 0, 1/2 and slit [0, 1/2].

    A vector v from a marked point P is kept when P + v is marked, the open
    segment meets no marked point, and it does not run through the slit.
    """
    L_sq = Fraction(L_sq)
    out = Counter()
    r = isqrt(int(L_sq)) + 2
    for px in (Fraction(0), HALF):
        for n in range(0, r + 1):
            for m2 in range(-2 * r, 2 * r + 1):
                v = (Fraction(m2, 2), Fraction(n))
                if not (v[1] > 0 or (v[1] == 0 and v[0] > 0)):
                    continue
                if v[0] ** 2 + v[1] ** 2 > L_sq:
                    continue
                if _frac(px + v[0]) not in (0, HALF):
                    continue
                if n == 0:
                    # horizontal: only the half-length segment [1/2, 1] is clear
                    if px == HALF and v[0] == HALF:
                        out[v] += 1
                    continue
                ok = True
                for k in range(1, n):
                    if _frac(px + k * v[0] / n) <= HALF:
                        ok = False
                        break
                if ok:
                    out[v] += 1
    return out
