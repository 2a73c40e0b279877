"""Convex-domain descriptors and distance-to-boundary (co-area) machinery.

Supports shapes with closed-form inner-parallel-body volumes: interval, box,
cube and ball.  The co-area integral rewrites an integral over the domain of a
function of the boundary distance as a 1D integral against the density
f(z) = |dV/dz|, and the convexity bound f(z) <= A gives a strict upper bound
in terms of the boundary area alone.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DivergenceError

_SHAPES = ("interval", "box", "cube", "ball")


@dataclass(frozen=True)
class ConvexDomain:
    """Geometric descriptor of a convex domain with closed-form V(z)."""

    kind: str
    lengths: tuple

    def __post_init__(self):
        if self.kind not in _SHAPES:
            raise ValueError(f"unsupported shape {self.kind!r}")
        if not all(l > 0 for l in self.lengths):
            raise ValueError("all lengths must be positive")
        n = {"interval": 1, "cube": 1, "ball": 1, "box": 3}[self.kind]
        if len(self.lengths) != n:
            raise ValueError(f"{self.kind} takes {n} length(s)")

    @classmethod
    def interval(cls, L):
        return cls("interval", (float(L),))

    @classmethod
    def cube(cls, L):
        return cls("cube", (float(L),))

    @classmethod
    def box(cls, l1, l2, l3):
        return cls("box", (float(l1), float(l2), float(l3)))

    @classmethod
    def ball(cls, radius):
        return cls("ball", (float(radius),))

    @property
    def sides(self):
        """Box side lengths (boxes and cubes only)."""
        if self.kind == "cube":
            return (self.lengths[0],) * 3
        if self.kind == "box":
            return self.lengths
        if self.kind == "interval":
            return self.lengths
        raise ValueError(f"{self.kind} has no sides")

    @property
    def volume(self):
        if self.kind == "interval":
            return self.lengths[0]
        if self.kind == "cube":
            return self.lengths[0] ** 3
        if self.kind == "box":
            return math.prod(self.lengths)
        return 4.0 * math.pi / 3.0 * self.lengths[0] ** 3

    @property
    def area(self):
        """Boundary measure (counts both endpoints for the interval)."""
        if self.kind == "interval":
            return 2.0
        if self.kind == "cube":
            return 6.0 * self.lengths[0] ** 2
        if self.kind == "box":
            a, b, c = self.lengths
            return 2.0 * (a * b + a * c + b * c)
        return 4.0 * math.pi * self.lengths[0] ** 2

    @property
    def diameter(self):
        if self.kind in ("interval",):
            return self.lengths[0]
        if self.kind == "cube":
            return math.sqrt(3.0) * self.lengths[0]
        if self.kind == "box":
            return math.sqrt(sum(l * l for l in self.lengths))
        return 2.0 * self.lengths[0]

    @property
    def inradius(self):
        if self.kind in ("interval", "cube"):
            return self.lengths[0] / 2.0
        if self.kind == "box":
            return min(self.lengths) / 2.0
        return self.lengths[0]

    def scaled(self, c):
        """Return the domain with all lengths multiplied by c > 0."""
        if not c > 0:
            raise ValueError("scale factor must be positive")
        return ConvexDomain(self.kind, tuple(c * l for l in self.lengths))


def inner_parallel_volume(domain, z):
    """Volume of the set of points with boundary distance >= z."""
    if z < 0:
        raise ValueError("z must be nonnegative")
    if domain.kind in ("interval", "cube", "box"):
        return math.prod(max(l - 2.0 * z, 0.0) for l in domain.sides)
    r = max(domain.lengths[0] - z, 0.0)
    return 4.0 * math.pi / 3.0 * r ** 3


def distance_density(domain, z):
    """Density f(z) = |dV/dz| of the boundary-distance measure.

    Vanishes beyond the inradius.  For the ball this is the inner-sphere area
    4 pi (L-z)^2; for boxes it is the exact derivative of prod(L_i - 2z).
    """
    if z < 0 or z > domain.diameter / 2.0:
        raise ValueError("z must lie in [0, diameter/2]")
    if z >= domain.inradius:
        return 0.0
    if domain.kind == "ball":
        return 4.0 * math.pi * (domain.lengths[0] - z) ** 2
    sides = [l - 2.0 * z for l in domain.sides]
    if domain.kind == "interval":
        return 2.0
    return 2.0 * sum(math.prod(sides) / s for s in sides)


def _quad_checked(f, a, b, rel_tol):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, a, b, epsabs=0.0, epsrel=rel_tol, limit=500)
        except integrate.IntegrationWarning as exc:
            raise DivergenceError(f"quadrature failed to settle: {exc}") from exc
    if not math.isfinite(val):
        raise DivergenceError("integral is non-finite")
    if err > max(10.0 * rel_tol * abs(val), 1e-300):
        raise DivergenceError("quadrature error estimate exceeds tolerance")
    return val


def coarea_integral(domain, g, rel_tol=1e-8):
    """int_Omega g(distance to boundary) dX = int_0^{D/2} g(z) f(z) dz.

    g may carry an integrable endpoint singularity at z = 0 (e.g. z^{eta/2-1}).
    A non-integrable g is reported as a DivergenceError.
    """
    return _quad_checked(lambda z: g(z) * distance_density(domain, z),
                         0.0, domain.inradius, rel_tol)


def coarea_upper_bound(domain, g, rel_tol=1e-8):
    """Convexity bound A(boundary) * int_0^{D/2} g(z) dz.

    Strictly exceeds coarea_integral for every admissible positive g, because
    f(z) < A on (0, inradius) and f vanishes beyond the inradius.
    """
    return domain.area * _quad_checked(g, 0.0, domain.diameter / 2.0, rel_tol)
