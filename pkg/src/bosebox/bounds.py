"""Inequality envelopes and the empirical thermodynamic-limit harness.

Three kinds of object live here: closed-form envelope evaluators (the
right-hand sides of the trace, energy and depletion estimates, with all free
constants stripped), empirical constant estimation for the pointwise diagonal
kernel bound, and convergence_sweep, which measures how fast a per-volume
quantity actually approaches its bulk value along a family of growing cubes
and compares the measured decay against the envelope.

Every envelope carries an unknown constant, so dominance is always tested in
calibrated form: the constant is fixed by the smallest size of the family and
the inequality diff <= constant * envelope is then checked at the larger
sizes.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bogoliubov import (
    DEFAULT_QUAD,
    bulk_depletion_finite_T,
    bulk_depletion_zero_T,
    bulk_energy_density,
    depletion_finite_T,
    depletion_zero_T,
    ground_state_energy,
)
from .errors import ToleranceError
from .free_gas import condensate_decomposition, critical_number
from .geometry import ConvexDomain
from .heat_kernel import (
    TraceQuery,
    box_trace,
    brown_envelope,
    bulk_kernel,
    diag_kernel_box,
)

SWEEP_QUANTITIES = (
    "trace_density",
    "energy_density",
    "depletion_zero_T",
    "depletion_finite_T",
    "free_gas_residual",
)

# Dominance comparisons allow this much relative slack so that the
# calibration size itself never "violates" its own constant through rounding.
_DOMINANCE_SLACK = 1e-9


def _check_eta(eta):
    if not 0.0 < eta < 1.0:
        raise ValueError("eta must lie in (0, 1)")


@dataclass(frozen=True)
class ConvergenceReport:
    """Measured approach of a per-volume quantity to its bulk value.

    abs_diffs are |value - bulk_ref| per size; fitted_exponent is the
    least-squares slope of -log(diff) against log(size), restricted to the
    pre-floor range when the differences hit the quadrature noise floor.
    envelope_constant is the largest ratio diff/envelope over all sizes;
    dominance is tested with the constant calibrated at the smallest size.
    """

    quantity: str
    eta: float
    sizes: tuple
    values: tuple
    bulk_ref: float
    abs_diffs: tuple
    envelopes: tuple
    fitted_exponent: float
    fit_r2: float
    envelope_constant: float
    dominance_ok: bool
    violations: tuple
    floor_limited: bool
    fit_range: tuple

    def __post_init__(self):
        if len(self.sizes) < 3:
            raise ValueError("a convergence report needs at least 3 sizes")
        if any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise ValueError("sizes must be strictly increasing")


def angelescu_nenciu_check(domain, s, d=3):
    """Dirichlet trace bound |Tr e^{s Delta_D} - V/(4 pi s)^{3/2}| <= e^{3/2} A / (2 (4 pi s)).

    Returns (lhs, rhs, holds).
    """
    if d != 3:
        raise ValueError("only d = 3 boxes are supported")
    if domain.kind not in ("box", "cube"):
        raise ValueError("angelescu_nenciu_check requires a box or cube")
    tr = box_trace(domain, TraceQuery(s=s, bc="dirichlet"))
    lhs = abs(tr - domain.volume * bulk_kernel(s))
    rhs = math.exp(1.5) * domain.area / (2.0 * (4.0 * math.pi * s) ** ((d - 1) / 2.0))
    return lhs, rhs, lhs <= rhs


def default_brown_grid(domain, n_points=20, n_times=20):
    """Deterministic (points, times) grid for estimate_brown_constant.

    Interior points along the main diagonal at fractions in [0.05, 0.5] of
    each side, times log-spaced over [1e-3, 10].
    """
    fracs = np.linspace(0.05, 0.5, n_points)
    points = tuple(tuple(f * L for L in domain.sides) for f in fracs)
    times = tuple(np.geomspace(1e-3, 10.0, n_times))
    return points, times


def estimate_brown_constant(domain, eta, grid=None):
    """Empirical constant of the pointwise Neumann diagonal-kernel bound.

    C_hat = max over the grid of |K_s(X,X) - bulk| / envelope(z, s, eta) with
    z the boundary distance of X.  The true constant is an upper bound for
    this for every grid; the estimate is used for calibrated dominance checks
    on larger domains of the same family.
    """
    _check_eta(eta)
    if domain.kind not in ("box", "cube"):
        raise ValueError("estimate_brown_constant requires a box or cube")
    if grid is None:
        grid = default_brown_grid(domain)
    points, times = grid
    if len(points) < 20 or len(times) < 20:
        raise ValueError("grid must contain at least 20 points and 20 times")
    best = 0.0
    for x in points:
        z = min(min(xi, L - xi) for xi, L in zip(x, domain.sides))
        if z <= 0.0:
            raise ValueError("grid contains boundary points")
        for s in times:
            num = abs(diag_kernel_box(x, domain, TraceQuery(s=s)) - bulk_kernel(s))
            best = max(best, num / brown_envelope(z, s, eta))
    if not math.isfinite(best):
        raise ToleranceError("brown constant estimate is non-finite")
    return best


def energy_envelope(domain, a, eta, per_volume=False):
    """Energy-difference envelope a^{2 + eta/4} * A * D^{eta/2}, constant stripped.

    With per_volume=True the result is divided by the volume, giving the decay
    D^{eta/2 - 1} of the per-volume energy difference along scaled families.
    """
    if not a > 0:
        raise ValueError("a must be positive")
    _check_eta(eta)
    out = a ** (2.0 + eta / 4.0) * domain.area * domain.diameter ** (eta / 2.0)
    return out / domain.volume if per_volume else out


def depletion_envelope_zero_T(domain, a, eta):
    """Zero-temperature depletion envelope a^{1 + eta/2} * A * D^{eta/2} / V."""
    if not a > 0:
        raise ValueError("a must be positive")
    _check_eta(eta)
    return a ** (1.0 + eta / 2.0) * domain.area * domain.diameter ** (eta / 2.0) / domain.volume


def depletion_envelope_finite_T(domain, a, beta, eta, split=False):
    """Thermal depletion envelope (a + a^2/beta) * D^{-(1 - eta/4)}.

    The two structural pieces carry independent free constants; both are
    defaulted to 1 here.  With split=True the pieces (a * D^{-(1-eta/4)},
    (a^2/beta) * D^{-(1-eta/4)}) are returned instead of their sum.
    """
    if not a > 0:
        raise ValueError("a must be positive")
    if not beta > 0:
        raise ValueError("beta must be positive")
    _check_eta(eta)
    decay = domain.diameter ** -(1.0 - eta / 4.0)
    pieces = (a * decay, a * a / beta * decay)
    return pieces if split else pieces[0] + pieces[1]


def _fit_loglog(sizes, diffs):
    """OLS slope and r^2 of log(diff) against log(size); exponent = -slope."""
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.asarray(diffs, dtype=float))
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    sxy = float(np.dot(dx, dy))
    syy = float(np.dot(dy, dy))
    slope = sxy / sxx
    r2 = 1.0 if syy == 0.0 else min(sxy * sxy / (sxx * syy), 1.0)
    return -slope, r2


def _quantity_evaluator(quantity, params, quad, s, lam, density_factor):
    """Per-size (value, envelope(eta)) evaluators and the bulk reference."""
    if quantity == "trace_density":
        bulk_ref = bulk_kernel(s)

        def value(dom):
            return box_trace(dom, TraceQuery(s=s)) / dom.volume

        def env(dom, eta):
            return dom.area / (dom.volume * 4.0 * math.pi * s)

    elif quantity == "energy_density":
        bulk_ref = bulk_energy_density(params)

        def value(dom):
            return ground_state_energy(dom, params, quad) / dom.volume

        def env(dom, eta):
            return energy_envelope(dom, params.a, eta, per_volume=True)

    elif quantity == "depletion_zero_T":
        bulk_ref = bulk_depletion_zero_T(params)

        def value(dom):
            return depletion_zero_T(dom, params, quad)

        def env(dom, eta):
            return depletion_envelope_zero_T(dom, params.a, eta)

    elif quantity == "depletion_finite_T":
        bulk_ref = bulk_depletion_finite_T(params, quad)

        def value(dom):
            return depletion_finite_T(dom, params, quad)

        def env(dom, eta):
            return depletion_envelope_finite_T(dom, params.a, params.beta, eta)

    elif quantity == "free_gas_residual":
        # Per-volume residual of the condensation decomposition at a fixed
        # supercritical density; its bulk limit is zero and it decays like
        # area/volume.
        bulk_ref = 0.0

        def value(dom):
            L = dom.sides[0]
            n_target = density_factor * critical_number(L, lam)
            return condensate_decomposition(n_target, L, lam).residual / dom.volume

        def env(dom, eta):
            return dom.area / dom.volume

    else:
        raise ValueError(f"unknown quantity {quantity!r}; choose from {SWEEP_QUANTITIES}")
    return value, env, bulk_ref


def convergence_sweep(quantity, sizes, eta, params=None, quad=DEFAULT_QUAD,
                      s=1.0, lam=1.0, density_factor=3.0, jobs=1, strict=False):
    """Measure the approach of a per-volume quantity to its bulk value on cubes.

    Evaluates the quantity on cubes of side `sizes` (at least 3, increasing),
    subtracts the bulk reference, fits the log-log decay exponent on the
    points above the quadrature noise floor, and performs the calibrated
    envelope-dominance check.  With strict=True a dominance violation raises
    ToleranceError; otherwise it is recorded in the report.

    params is the BogoliubovParams shared by all sizes (the coupling and
    condensate density are held fixed along the family); s is the diffusion
    time of the trace_density sweep; lam and density_factor configure the
    free-gas sweep.
    """
    sizes = tuple(float(L) for L in sizes)
    if len(sizes) < 3:
        raise ValueError("convergence_sweep needs at least 3 sizes")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    _check_eta(eta)
    if quantity in ("energy_density", "depletion_zero_T", "depletion_finite_T") and params is None:
        raise ValueError(f"{quantity} requires BogoliubovParams")

    value, env, bulk_ref = _quantity_evaluator(quantity, params, quad, s, lam, density_factor)
    domains = [ConvexDomain.cube(L) for L in sizes]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            values = tuple(ex.map(value, domains))
    else:
        values = tuple(value(dom) for dom in domains)
    diffs = tuple(abs(v - bulk_ref) for v in values)
    envelopes = tuple(env(dom, eta) for dom in domains)

    # Noise floor: differences below quadrature accuracy are meaningless and
    # are excluded from the fit.
    floor = 10.0 * quad.rel_tol * abs(bulk_ref)
    n_fit = len(sizes)
    for i, d in enumerate(diffs):
        if d <= floor:
            n_fit = i
            break
    floor_limited = n_fit < len(sizes)
    if n_fit >= 2:
        fitted, r2 = _fit_loglog(sizes[:n_fit], diffs[:n_fit])
    else:
        fitted, r2 = float("nan"), 0.0

    ratios = [d / e for d, e in zip(diffs, envelopes)]
    constant = max(ratios)
    cal = ratios[0]
    violations = tuple(
        (sizes[i], diffs[i], cal * envelopes[i])
        for i in range(1, len(sizes))
        if diffs[i] > cal * envelopes[i] * (1.0 + _DOMINANCE_SLACK) and diffs[i] > floor
    )
    dominance_ok = not violations
    report = ConvergenceReport(
        quantity=quantity,
        eta=eta,
        sizes=sizes,
        values=values,
        bulk_ref=bulk_ref,
        abs_diffs=diffs,
        envelopes=envelopes,
        fitted_exponent=fitted,
        fit_r2=r2,
        envelope_constant=constant,
        dominance_ok=dominance_ok,
        violations=violations,
        floor_limited=floor_limited,
        fit_range=sizes[:n_fit],
    )
    if strict and not dominance_ok:
        rows = ", ".join(f"L={L:g}: diff={d:.3e} > allowed {m:.3e}" for L, d, m in violations)
        raise ToleranceError(f"envelope dominance violated for {quantity}: {rows}")
    return report
