"""Finite-size condensation machinery for the free Bose gas in a box.

The particle number is a sum over Boltzmann powers j of a cubed lattice theta
function, evaluable either termwise (direct) or through the Jacobi transform
(Poisson-resummed); the two routes agree to near machine precision and that
agreement is the central self-check of this module.  The ground-mode occupancy
is split off in closed form, so the sum stays convergent arbitrarily close to
the mu -> 0- condensation point.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .errors import DivergenceError, NonCondensedError, ToleranceError, TruncationError
from .specfun import bose_g

_REPRESENTATIONS = ("direct", "poisson", "auto")
_ZETA_32 = float(special.zeta(1.5))

# Bisection bracket realizing (-inf, 0) at machine scale.
_MU_BETA_MIN = -50.0
_MU_BETA_MAX = -1e-16

_TOL = 1e-13
_MAX_J_BLOCKS = 64


@dataclass(frozen=True)
class FreeGasState:
    """Box side L, thermal wavelength lambda, and dimensionless mu*beta <= 0."""

    L: float
    lam: float
    mu_beta: float

    def __post_init__(self):
        if not (self.L > 0 and self.lam > 0):
            raise ValueError("L and lam must be positive")
        if self.mu_beta > 0:
            raise ValueError("mu_beta must be nonpositive")


@dataclass(frozen=True)
class FugacityResult:
    """Solved chemical potential with regime flags."""

    mu_beta: float
    particle_number: float
    condensed: bool
    saturated: bool


@dataclass(frozen=True)
class CondensateDecomposition:
    """Bookkeeping split N = n_bulk + n_condensate + residual."""

    n_bulk: float
    n_condensate: float
    residual: float
    c_estimate: float
    mu_beta: float

    @property
    def total(self):
        return self.n_bulk + self.n_condensate + self.residual


def _theta3_direct(alpha):
    """Full-lattice theta sum_{n in Z} exp(-pi alpha n^2), elementwise."""
    alpha = np.asarray(alpha, dtype=float)
    out = np.ones_like(alpha)
    nmax = int(math.ceil(math.sqrt(40.0 / (math.pi * float(np.min(alpha)))))) + 2
    n = np.arange(1, nmax + 1, dtype=float)
    out = out + 2.0 * np.exp(-math.pi * np.outer(alpha, n * n)).sum(axis=1)
    return out


def _theta3_poisson(alpha):
    """Jacobi-transformed evaluation alpha^{-1/2} theta(1/alpha), elementwise."""
    alpha = np.asarray(alpha, dtype=float)
    return _theta3_direct(1.0 / alpha) / np.sqrt(alpha)


def _theta3(alpha, representation):
    if representation == "direct":
        return _theta3_direct(alpha)
    if representation == "poisson":
        return _theta3_poisson(alpha)
    # auto: pick the fast route per element
    alpha = np.asarray(alpha, dtype=float)
    out = np.empty_like(alpha)
    small = alpha < 1.0
    if np.any(small):
        out[small] = _theta3_poisson(alpha[small])
    if np.any(~small):
        out[~small] = _theta3_direct(alpha[~small])
    return out


def particle_number(state, representation="auto", mode_cutoff=None):
    """Total particle number N(mu_beta) for the box gas.

    N = z/(1-z) + sum_{j>=1} z^j (theta(j alpha_1)^3 - 1) with z = e^{mu_beta}
    and alpha_1 = (lambda/L)^2; the ground-mode geometric series is summed in
    closed form.  At mu_beta = 0 the sum diverges unless a finite mode_cutoff
    is supplied, in which case the occupancies of the nonzero modes with
    |n_i| <= mode_cutoff are summed directly.
    """
    if representation not in _REPRESENTATIONS:
        raise ValueError(f"representation must be one of {_REPRESENTATIONS}")
    alpha1 = (state.lam / state.L) ** 2
    if state.mu_beta == 0.0:
        if mode_cutoff is None:
            raise DivergenceError("particle number diverges at mu_beta = 0 without a mode cutoff")
        n = np.arange(-mode_cutoff, mode_cutoff + 1)
        n2 = (n[:, None, None] ** 2 + n[None, :, None] ** 2 + n[None, None, :] ** 2).ravel()
        n2 = n2[n2 > 0]
        x = np.exp(-math.pi * alpha1 * n2)
        return float(np.sum(x / (1.0 - x)))

    z = math.exp(state.mu_beta)
    total = z / (1.0 - z)
    j0 = 1
    block = 256
    for _ in range(_MAX_J_BLOCKS):
        j = np.arange(j0, j0 + block, dtype=float)
        theta = _theta3(j * alpha1, representation)
        total += float(np.sum(np.exp(j * state.mu_beta) * (theta ** 3 - 1.0)))
        jend = j0 + block - 1
        # geometric tail certificate once theta - 1 is small
        t1 = 2.0 * math.exp(-math.pi * alpha1 * (jend + 1))
        if t1 < 0.1:
            ratio = z * math.exp(-math.pi * alpha1)
            tail = 3.5 * math.exp((jend + 1) * state.mu_beta) * t1 / (1.0 - ratio)
            if tail < _TOL * total:
                return total
        j0 += block
        block = min(2 * block, 1 << 17)
    raise TruncationError("particle_number failed to certify its j-sum truncation")


def particle_number_direct(state, mode_cutoff=None):
    """Particle number with every theta factor summed as the eigenvalue series."""
    return particle_number(state, representation="direct", mode_cutoff=mode_cutoff)


def particle_number_poisson(state, mode_cutoff=None):
    """Particle number with every theta factor evaluated via Poisson summation."""
    return particle_number(state, representation="poisson", mode_cutoff=mode_cutoff)


def critical_number(L, lam):
    """Bulk critical particle number (L/lambda)^3 zeta(3/2)."""
    return (L / lam) ** 3 * _ZETA_32


def solve_fugacity(N_target, L, lam, rel_tol=1e-8):
    """Solve N(mu_beta) = N_target for mu_beta < 0.

    Returns a FugacityResult; if N_target exceeds the value attainable at the
    machine bracket edge, the result is flagged saturated instead of raising.
    """
    if not N_target > 0:
        raise ValueError("N_target must be positive")

    def f(mb):
        return particle_number(FreeGasState(L, lam, mb)) - N_target

    condensed = N_target > critical_number(L, lam)
    if f(_MU_BETA_MAX) < 0.0:
        n = particle_number(FreeGasState(L, lam, _MU_BETA_MAX))
        return FugacityResult(_MU_BETA_MAX, n, condensed, True)
    if f(_MU_BETA_MIN) > 0.0:
        raise ValueError("N_target below the attainable range of the bracket")
    mb = optimize.brentq(f, _MU_BETA_MIN, _MU_BETA_MAX, xtol=1e-300, rtol=9e-16, maxiter=300)
    n = particle_number(FreeGasState(L, lam, mb))
    if abs(n - N_target) > rel_tol * N_target:
        raise ToleranceError("fugacity solve missed the requested tolerance")
    return FugacityResult(mb, n, condensed, False)


def condensate_decomposition(N_target, L, lam):
    """Split a condensed state into bulk, ground-mode condensate and residual.

    The residual times lambda^2/L^2 estimates the coefficient of the
    area-order correction term.
    """
    res = solve_fugacity(N_target, L, lam)
    if not res.condensed:
        raise NonCondensedError("condensate_decomposition requires a supercritical N_target")
    z = math.exp(res.mu_beta)
    n_bulk = (L / lam) ** 3 * bose_g(1.5, z)
    n_cond = z / (1.0 - z)
    residual = N_target - n_bulk - n_cond
    c_estimate = residual * (lam / L) ** 2
    return CondensateDecomposition(n_bulk, n_cond, residual, c_estimate, res.mu_beta)
