"""Special functions and the integral identities used by the heat-kernel estimates.

Exports exponentially scaled modified Bessel functions of the orders that occur
in the depletion integrands, the modified Bessel function of the second kind
for orders in (0, 1], the Bose series g_s(z), and three identity residuals
(each the relative disagreement between an independent quadrature of one side
of an identity and the closed form of the other side).
"""

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import integrate, special

from .errors import TruncationError

_I_ORDERS = (0.0, 0.5, 1.0)

# Direct summation of g_s(z) is used below this z; closer to the z = 1
# boundary the series tail decays too slowly and polylog evaluation in
# extended precision takes over.
_BOSE_SERIES_ZMAX = 0.99


@dataclass(frozen=True)
class SpecFunConfig:
    """Tolerances and caps for series summation and quadrature."""

    series_rel_tol: float = 1e-15
    quad_rel_tol: float = 1e-10
    max_terms: int = 10_000_000

    def __post_init__(self):
        if not (self.series_rel_tol > 0 and self.quad_rel_tol > 0):
            raise ValueError("tolerances must be strictly positive")
        if self.max_terms < 10:
            raise ValueError("max_terms must be at least 10")


DEFAULT_CONFIG = SpecFunConfig()


def bessel_i_scaled(order, x):
    """Exponentially scaled modified Bessel function e^{-x} I_order(x).

    Only orders 0, 1/2 and 1 are supported; these are the orders entering the
    depletion integrands, where I_order is always paired with a dominating
    decaying exponential.  The scaled form stays finite for arbitrarily large
    arguments.
    """
    if order not in _I_ORDERS:
        raise ValueError(f"unsupported order {order!r}; supported: {_I_ORDERS}")
    if x < 0:
        raise ValueError("x must be nonnegative")
    return float(special.ive(order, x))


def bessel_k(order, x):
    """Modified Bessel function of the second kind K_order(x) for order in (0, 1]."""
    if not 0.0 < order <= 1.0:
        raise ValueError("order must lie in (0, 1]")
    if not x > 0:
        raise ValueError("x must be positive")
    return float(special.kv(order, x))


def bose_g(s, z, config=DEFAULT_CONFIG):
    """Bose function g_s(z) = sum_{j>=1} z^j / j^s for s > 1 and z in [0, 1].

    For z away from 1 the series is summed directly with a certified geometric
    tail bound; near z = 1 (including z = 1, where the value is zeta(s)) the
    evaluation is delegated to an extended-precision polylogarithm.
    """
    if not s > 1:
        raise ValueError("s must exceed 1")
    if z < 0 or z > 1:
        raise ValueError("z must lie in [0, 1]")
    if z == 0.0:
        return 0.0
    if z > _BOSE_SERIES_ZMAX:
        with mpmath.workdps(30):
            return float(mpmath.polylog(s, z))
    total = 0.0
    j0 = 1
    block = 64
    while j0 <= config.max_terms:
        j = np.arange(j0, j0 + block, dtype=float)
        total += float(np.sum(z ** j / j ** s))
        jend = j0 + block - 1
        tail = z ** (jend + 1) / ((jend + 1) ** s * (1.0 - z))
        if tail < config.series_rel_tol * total:
            return total
        j0 += block
        block = min(2 * block, 65536)
    raise TruncationError("bose_g series did not certify within max_terms")


def _quad(f, a, b, rel_tol, **kw):
    val, err = integrate.quad(f, a, b, epsabs=0.0, epsrel=rel_tol, limit=300, **kw)
    return val


def residual_i1_identity(u, config=DEFAULT_CONFIG):
    """Relative residual of (2/pi) int_0^1 sqrt(1-y^2) cosh(uy) dy = I_1(u)/u.

    Both sides are evaluated in exponentially scaled form so the residual is
    meaningful for large u as well.
    """
    if not u > 0:
        raise ValueError("u must be positive")

    def lhs_scaled(y):
        # e^{-u} * cosh(u y), kept overflow-free
        return math.sqrt(1.0 - y * y) * 0.5 * (
            math.exp(-u * (1.0 - y)) + math.exp(-u * (1.0 + y))
        )

    lhs = (2.0 / math.pi) * _quad(lhs_scaled, 0.0, 1.0, config.quad_rel_tol)
    rhs = special.ive(1, u) / u
    return abs(lhs - rhs) / rhs


def residual_k_integral_rep(order, x, config=DEFAULT_CONFIG):
    """Residuals of two integral representations of K_nu against bessel_k.

    Checks the Laplace-type representation

        K_nu(x) = sqrt(pi/(2x)) e^{-x} / Gamma(nu+1/2)
                  * int_0^inf e^{-s} s^{nu-1/2} (1 + s/(2x))^{nu-1/2} ds

    and the cosine representation

        K_nu(x) = Gamma(nu+1/2) 2^nu / (sqrt(pi) x^nu)
                  * int_0^inf cos(x t) (t^2+1)^{-(nu+1/2)} dt,

    returning the larger of the two relative residuals.
    """
    if not 0.0 < order < 1.0:
        raise ValueError("order must lie in (0, 1)")
    if not x > 0:
        raise ValueError("x must be positive")
    ref = bessel_k(order, x)

    lap = _quad(
        lambda t: math.exp(-t) * t ** (order - 0.5) * (1.0 + t / (2.0 * x)) ** (order - 0.5),
        0.0,
        np.inf,
        config.quad_rel_tol,
    )
    rep_laplace = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) / special.gamma(order + 0.5) * lap

    # QAWF handles the slowly decaying oscillatory tail with extrapolation.
    cos_int, _ = integrate.quad(
        lambda t: (t * t + 1.0) ** -(order + 0.5),
        0.0,
        np.inf,
        weight="cos",
        wvar=x,
        limit=300,
    )
    rep_cosine = (
        special.gamma(order + 0.5) * 2.0 ** order / (math.sqrt(math.pi) * x ** order) * cos_int
    )

    return max(abs(rep_laplace - ref), abs(rep_cosine - ref)) / ref


def residual_gr6682(mu, nu, x, config=DEFAULT_CONFIG):
    """Relative residual of the product formula

        int_0^{pi/2} cos(2 mu theta) I_{2 nu}(2 x cos theta) d theta
            = (pi/2) I_{nu-mu}(x) I_{nu+mu}(x).

    Both sides are evaluated scaled by e^{-2x}.  The right-hand-side orders
    nu-mu and nu+mu must reduce to the supported set {0, 1/2, 1}.
    """
    if mu < 0 or nu < 0:
        raise ValueError("mu and nu must be nonnegative")
    if not x > 0:
        raise ValueError("x must be positive")
    lo, hi = nu - mu, nu + mu
    if lo not in _I_ORDERS or hi not in _I_ORDERS:
        raise ValueError(
            f"orders nu-mu={lo}, nu+mu={hi} not in the supported set {_I_ORDERS}"
        )

    def lhs_scaled(theta):
        c = math.cos(theta)
        return math.cos(2.0 * mu * theta) * special.ive(2.0 * nu, 2.0 * x * c) * math.exp(
            -2.0 * x * (1.0 - c)
        )

    lhs = _quad(lhs_scaled, 0.0, math.pi / 2.0, config.quad_rel_tol)
    rhs = (math.pi / 2.0) * special.ive(lo, x) * special.ive(hi, x)
    return abs(lhs - rhs) / rhs
