"""Bogoliubov-model thermodynamics on a finite box, with flat-space bulk limits.

The ground-state energy and the zero/finite temperature depletion densities
are all expressed as integrals of heat-kernel traces against weights built
from modified Bessel functions.  Each finite-volume quantity has a bulk
counterpart obtained by replacing the per-volume primed trace with the
flat-space kernel (4 pi s)^{-3/2}.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import ToleranceError, TruncationError
from .heat_kernel import box_trace, box_trace_prime, bulk_kernel, TraceQuery
from .specfun import bose_g

# Closed forms of the two bulk integrals:
#   J  = int_0^inf dt t^{-3/2} int_0^1 dx F(t,x)        = 32 sqrt(2 pi)/15
#   Xi = int_0^inf du u^{-3/2} e^{-u} I_1(u)            = 4 sqrt(2)/(3 sqrt(pi))
J_CONSTANT = 32.0 * math.sqrt(2.0 * math.pi) / 15.0
XI_CONSTANT = 4.0 * math.sqrt(2.0) / (3.0 * math.sqrt(math.pi))


@dataclass(frozen=True)
class BogoliubovParams:
    """Coupling u0, condensate density n0 and optional inverse temperature."""

    u0: float
    n0: float
    beta: float = None

    def __post_init__(self):
        if not (self.u0 > 0 and self.n0 > 0):
            raise ValueError("u0 and n0 must be positive")
        if self.beta is not None and not self.beta > 0:
            raise ValueError("beta must be positive when given")

    @property
    def a(self):
        """The small parameter a = u0 n0, held fixed along thermodynamic sweeps."""
        return self.u0 * self.n0


@dataclass(frozen=True)
class QuadratureConfig:
    """Splitting and truncation policy for the improper time integrals."""

    rel_tol: float = 1e-8
    t_split: float = 1.0
    tail_cut_factor: float = 40.0
    k_max: int = 100_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.t_split > 0 and self.tail_cut_factor > 0
                and self.k_max > 0):
            raise ValueError("all quadrature-config fields must be positive")


DEFAULT_QUAD = QuadratureConfig()


def f_kernel(t, x):
    """Energy weight F(t,x) = sqrt(1-x^2) (1 - e^{-t(1-x)} + 1 - e^{-t(1+x)})."""
    if not t > 0:
        raise ValueError("t must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    return math.sqrt(1.0 - x * x) * (2.0 - math.exp(-t * (1.0 - x)) - math.exp(-t * (1.0 + x)))


def _f_kernel_x_integral(t):
    """int_0^1 F(t,x) dx = (pi/2) (1 - 2 e^{-t} I_1(t)/t), series-protected at small t."""
    if t < 1e-4:
        # 1 - 2 e^{-t} I_1(t)/t = t - 5 t^2/8 + 7 t^3/24 + O(t^4)
        return (math.pi / 2.0) * (t - 0.625 * t * t + (7.0 / 24.0) * t ** 3)
    return (math.pi / 2.0) * (1.0 - 2.0 * special.ive(1, t) / t)


def _integrate_improper(h, t_split, t_max, rel_tol):
    """quad on [0, t_split] plus a log-substituted tail on [t_split, t_max]."""
    head, _ = integrate.quad(h, 0.0, t_split, epsabs=0.0, epsrel=rel_tol, limit=400)
    if t_max <= t_split:
        return head

    def on_log(u):
        t = math.exp(min(u, 700.0))
        return h(t) * t

    tail, _ = integrate.quad(on_log, math.log(t_split),
                             math.log(t_max) if math.isfinite(t_max) else np.inf,
                             epsabs=0.0, epsrel=rel_tol, limit=400)
    return head + tail


def _smallest_gap(domain):
    """Smallest nonzero Neumann eigenvalue (pi/L_max)^2 of the box."""
    return (math.pi / max(domain.sides)) ** 2


def _require_box(domain):
    if domain.kind not in ("box", "cube"):
        raise ValueError("operation requires a box or cube domain")


def ground_state_energy(domain, p, q=DEFAULT_QUAD):
    """Bogoliubov ground-state energy of the box.

    E = u0 n0^2 V/2 - (a V / 2 pi) int_0^inf dt int_0^1 dx F(t,x)
        * (1/V) Tr' exp(Laplacian t / a).
    """
    _require_box(domain)
    a = p.a
    V = domain.volume
    lam1 = _smallest_gap(domain)
    t_max = q.tail_cut_factor * a / lam1

    def h(t):
        return _f_kernel_x_integral(t) * box_trace_prime(domain, t / a) / V

    integral = _integrate_improper(h, q.t_split, t_max, q.rel_tol)
    return p.u0 * p.n0 ** 2 * V / 2.0 - (a * V / (2.0 * math.pi)) * integral


def bulk_energy_density(p):
    """Flat-space energy density u0 n0^2/2 - (a/2pi)(a/4pi)^{3/2} J."""
    a = p.a
    return p.u0 * p.n0 ** 2 / 2.0 - (a / (2.0 * math.pi)) * (a / (4.0 * math.pi)) ** 1.5 * J_CONSTANT


def depletion_zero_T(domain, p, q=DEFAULT_QUAD):
    """Zero-temperature depletion density on the box.

    n_e(0) = (a/2) int_0^inf dt (1/V) Tr'(e^{Laplacian t}) e^{-a t} I_1(a t),
    with the Bessel-exponential pair evaluated in scaled form.
    """
    _require_box(domain)
    a = p.a
    V = domain.volume
    lam1 = _smallest_gap(domain)
    t_max = q.tail_cut_factor / lam1

    def h(t):
        return box_trace_prime(domain, t) / V * special.ive(1, a * t)

    return (a / 2.0) * _integrate_improper(h, q.t_split, t_max, q.rel_tol)


def bulk_depletion_zero_T(p):
    """Flat-space zero-temperature depletion sqrt(2) a^{3/2} / (12 pi^2)."""
    return math.sqrt(2.0) * p.a ** 1.5 / (12.0 * math.pi ** 2)


def _finite_t_term(k, domain, p, q, include_zero_mode):
    """k-th term of the finite-temperature depletion sum (k may be real)."""
    a = p.a
    beta = p.beta
    V = domain.volume
    kb = k * beta
    if include_zero_mode:
        first = box_trace(domain, TraceQuery(s=kb, bc="neumann")) / V * math.exp(-kb * a)
    else:
        first = box_trace_prime(domain, kb) / V * math.exp(-kb * a)
    lam1 = _smallest_gap(domain)
    t_max = q.tail_cut_factor / lam1

    def h(t):
        sigma = math.hypot(kb, t)
        # e^{-a sigma} I_1(a t) = e^{-a (sigma - t)} * [e^{-a t} I_1(a t)]
        return (box_trace_prime(domain, sigma) / V
                * math.exp(-a * (sigma - t)) * special.ive(1, a * t))

    second = a * _integrate_improper(h, q.t_split, t_max, q.rel_tol)
    return first + second


def _bulk_finite_t_term(k, p, q):
    a = p.a
    beta = p.beta
    kb = k * beta
    first = (4.0 * math.pi * kb) ** -1.5 * math.exp(-kb * a)

    def h(t):
        sigma = math.hypot(kb, t)
        return (4.0 * math.pi * sigma) ** -1.5 * math.exp(-a * (sigma - t)) * special.ive(1, a * t)

    second = a * _integrate_improper(h, q.t_split, np.inf, q.rel_tol)
    return first + second


def _sum_k_terms(term, q, switch_frac=1e-4):
    """Sum term(k) for k = 1, 2, ... with an integral-accelerated tail.

    Terms are summed explicitly until they drop below switch_frac of the
    running total; the remainder is the Euler-Maclaurin midpoint form
    int_{K+1/2}^inf term(k) dk - term'(K+1/2)/24, whose residual error is two
    orders in 1/K below the switch threshold.
    """
    total = 0.0
    k = 0
    while True:
        k += 1
        if k > q.k_max:
            raise TruncationError("finite-temperature k-sum exceeded k_max")
        t = term(k)
        total += t
        if k >= 3 and (total == 0.0 or t < switch_frac * total):
            break
    if total == 0.0:
        return 0.0
    kc = k + 0.5
    tail, _ = integrate.quad(term, kc, np.inf, epsabs=0.0, epsrel=1e-6, limit=200)
    dterm = (term(kc + 0.25) - term(kc - 0.25)) / 0.5
    return total + tail - dterm / 24.0


def depletion_finite_T(domain, p, q=DEFAULT_QUAD, include_zero_mode=True):
    """Thermal part of the depletion density on the box.

    Sums over k the Matsubara-like pair of a trace term at time k beta and a
    time integral of the trace at sqrt((k beta)^2 + t^2) weighted with the
    scaled Bessel pair.  The time-integral trace is always primed (the zero
    mode would render it divergent); include_zero_mode only controls whether
    the first, purely thermal term keeps the constant mode.
    """
    _require_box(domain)
    if p.beta is None:
        raise ValueError("finite-temperature depletion requires beta")
    return _sum_k_terms(lambda k: _finite_t_term(k, domain, p, q, include_zero_mode), q)


def zero_mode_thermal_occupancy(domain, p):
    """The term (1/V) sum_k e^{-k beta a} separating primed from unprimed sums."""
    if p.beta is None:
        raise ValueError("requires beta")
    x = math.exp(-p.beta * p.a)
    return x / (1.0 - x) / domain.volume


def bulk_depletion_finite_T(p, q=DEFAULT_QUAD):
    """Flat-space thermal depletion: the same k-sum with bulk kernels.

    Both pieces use the (4 pi s)^{-3/2} normalization of the bulk kernel.
    """
    if p.beta is None:
        raise ValueError("finite-temperature depletion requires beta")
    return _sum_k_terms(lambda k: _bulk_finite_t_term(k, p, q), q)


def free_thermal_density(domain, p, q=DEFAULT_QUAD, include_zero_mode=True):
    """The a -> 0 reduction of the first finite-T piece: sum_k Tr(e^{Laplacian k beta}) e^{-k beta a} / V."""
    if p.beta is None:
        raise ValueError("requires beta")

    def term(k):
        kb = k * p.beta
        tr = (box_trace(domain, TraceQuery(s=kb, bc="neumann")) if include_zero_mode
              else box_trace_prime(domain, kb))
        return tr / domain.volume * math.exp(-kb * p.a)

    return _sum_k_terms(term, q)
