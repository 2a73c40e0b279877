"""Exact heat-kernel traces and diagonal kernels on intervals and boxes.

All series come in two representations related by Poisson summation: the
spectral (eigenvalue) sum, efficient for large diffusion time, and the image
(reflection) sum, efficient for small time.  The automatic policy switches at
s = L^2/pi where both need O(1) terms.
"""

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ConvexDomain

_BCS = ("neumann", "dirichlet")
_REPRESENTATIONS = ("spectral", "image", "auto")

# Stop when the next term falls below this times the partial sum, then add a
# fixed safety margin of terms; the recorded bound certifies the remainder.
_TERM_TOL = 1e-15
_SAFETY_TERMS = 8


@dataclass(frozen=True)
class TraceQuery:
    """Boundary condition, diffusion time and representation policy."""

    s: float
    bc: str = "neumann"
    representation: str = "auto"

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError("diffusion time s must be positive")
        if self.bc not in _BCS:
            raise ValueError(f"bc must be one of {_BCS}")
        if self.representation not in _REPRESENTATIONS:
            raise ValueError(f"representation must be one of {_REPRESENTATIONS}")


@dataclass(frozen=True)
class KernelValue:
    """A computed kernel/trace value with its certified truncation bound."""

    value: float
    truncation_bound: float = 0.0


def _pick_representation(L, s, representation):
    if representation != "auto":
        return representation
    return "spectral" if s >= L * L / math.pi else "image"


def _interval_trace_kv(L, s, bc, representation):
    rep = _pick_representation(L, s, representation)
    if rep == "spectral":
        # sum_{n>=n0} exp(-s (pi n / L)^2), n0 = 0 (Neumann) or 1 (Dirichlet)
        r = s * (math.pi / L) ** 2
        total = 1.0 if bc == "neumann" else 0.0
        n = 1
        while True:
            term = math.exp(-r * n * n)
            total += term
            if term == 0.0 or term < _TERM_TOL * total:
                break
            n += 1
        for m in range(n + 1, n + 1 + _SAFETY_TERMS):
            total += math.exp(-r * m * m)
        ntail = n + 1 + _SAFETY_TERMS
        bound = math.exp(-r * ntail * ntail) / max(1.0 - math.exp(-r * (2 * ntail + 1)), 1e-300)
        return KernelValue(total, bound)
    # image (Poisson-dual) form: +-1/2 + L/sqrt(4 pi s) * (1 + 2 sum exp(-L^2 q^2/s))
    r = L * L / s
    dual = 1.0
    q = 1
    while True:
        term = 2.0 * math.exp(-r * q * q)
        dual += term
        if term == 0.0 or term < _TERM_TOL * dual:
            break
        q += 1
    for m in range(q + 1, q + 1 + _SAFETY_TERMS):
        dual += 2.0 * math.exp(-r * m * m)
    qtail = q + 1 + _SAFETY_TERMS
    bound = 2.0 * math.exp(-r * qtail * qtail) / max(1.0 - math.exp(-r * (2 * qtail + 1)), 1e-300)
    half = 0.5 if bc == "neumann" else -0.5
    pref = L / math.sqrt(4.0 * math.pi * s)
    return KernelValue(half + pref * dual, pref * bound)


def interval_trace(L, q):
    """Heat trace sum_n exp(-s (pi n/L)^2) on an interval of length L."""
    if not L > 0:
        raise ValueError("L must be positive")
    return _interval_trace_kv(L, q.s, q.bc, q.representation).value


def box_trace(domain, q):
    """Heat trace on a box/cube: product of the three interval traces."""
    if domain.kind not in ("box", "cube"):
        raise ValueError("box_trace requires a box or cube domain")
    out = 1.0
    for L in domain.sides:
        out *= _interval_trace_kv(L, q.s, q.bc, q.representation).value
    return out


def box_trace_prime(domain, s):
    """Neumann box trace with the zero (constant) mode removed; always >= 0."""
    return max(box_trace(domain, TraceQuery(s=s, bc="neumann")) - 1.0, 0.0)


def bulk_kernel(s, d=3):
    """Flat-space diagonal heat kernel (4 pi s)^{-d/2}."""
    if not s > 0:
        raise ValueError("s must be positive")
    return (4.0 * math.pi * s) ** (-d / 2.0)


def boundary_distance(domain, X):
    """Distance from an interior point X to the boundary of a box/cube."""
    if domain.kind not in ("box", "cube"):
        raise ValueError("boundary_distance is implemented for boxes only")
    return min(min(x, L - x) for x, L in zip(X, domain.sides))


def _diag_1d(x, L, s, bc, representation):
    rep = _pick_representation(L, s, representation)
    sign = 1.0 if bc == "neumann" else -1.0
    if rep == "spectral":
        r = s * (math.pi / L) ** 2
        total = 1.0 / L if bc == "neumann" else 0.0
        n = 1
        while True:
            decay = math.exp(-r * n * n)
            ang = math.cos(n * math.pi * x / L) if bc == "neumann" else math.sin(n * math.pi * x / L)
            total += (2.0 / L) * decay * ang * ang
            if decay < _TERM_TOL * max(total, 1.0 / L):
                break
            n += 1
        return total
    pref = 1.0 / math.sqrt(4.0 * math.pi * s)
    total = 1.0 + sign * math.exp(-x * x / s)  # m = 0 images
    m = 1
    while True:
        added = 0.0
        for mm in (m, -m):
            added += math.exp(-((mm * L) ** 2) / s)
            added += sign * math.exp(-((x - mm * L) ** 2) / s)
        total += added
        if added == 0.0 or abs(added) < _TERM_TOL * abs(total):
            break
        m += 1
    return pref * total


def diag_kernel_box(X, domain, q):
    """Diagonal heat kernel K_s(X, X) at an interior point of a box/cube.

    The 3D kernel factorizes into 1D diagonal kernels.  Points on (or within
    1e-12 of a side length of) the boundary are refused: the boundary limit is
    boundary-condition dependent and outside the estimate's scope.
    """
    if domain.kind not in ("box", "cube"):
        raise ValueError("diag_kernel_box requires a box or cube domain")
    sides = domain.sides
    if len(X) != 3:
        raise ValueError("X must be a 3D point")
    for x, L in zip(X, sides):
        if x <= 1e-12 * L or x >= L * (1.0 - 1e-12):
            raise ValueError("X must be strictly inside the domain")
    out = 1.0
    for x, L in zip(X, sides):
        out *= _diag_1d(x, L, q.s, q.bc, q.representation)
    return out


def brown_envelope(z, s, eta):
    """Pointwise envelope (z/sqrt(s))^eta exp(-z^2/s) (4 pi s)^{-3/2}.

    This is the constant-stripped right-hand side of the Neumann diagonal
    kernel estimate; z is the distance of the evaluation point to the boundary.
    """
    if not z > 0:
        raise ValueError("z must be positive")
    if not s > 0:
        raise ValueError("s must be positive")
    if not 0.0 < eta < 1.0:
        raise ValueError("eta must lie in (0, 1)")
    return (z / math.sqrt(s)) ** eta * math.exp(-z * z / s) * bulk_kernel(s)
