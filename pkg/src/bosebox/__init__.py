"""Finite-volume heat-kernel traces and Bose-gas thermodynamics.

Subpackages by theme: specfun (Bessel/Bose special functions and identity
residuals), geometry (convex domains and the boundary-distance co-area
machinery), heat_kernel (dual-series traces and diagonal kernels), free_gas
(Poisson-summation condensation expansion), bogoliubov (ground-state energy
and depletion densities with their bulk limits), bounds (envelopes and the
thermodynamic-limit convergence harness), cli (batch front end).
"""

from .bogoliubov import (
    BogoliubovParams,
    J_CONSTANT,
    QuadratureConfig,
    XI_CONSTANT,
    bulk_depletion_finite_T,
    bulk_depletion_zero_T,
    bulk_energy_density,
    depletion_finite_T,
    depletion_zero_T,
    ground_state_energy,
)
from .bounds import (
    ConvergenceReport,
    angelescu_nenciu_check,
    convergence_sweep,
    depletion_envelope_finite_T,
    depletion_envelope_zero_T,
    energy_envelope,
    estimate_brown_constant,
)
from .errors import (
    DivergenceError,
    NonCondensedError,
    ToleranceError,
    TruncationError,
)
from .free_gas import (
    CondensateDecomposition,
    FreeGasState,
    FugacityResult,
    condensate_decomposition,
    critical_number,
    particle_number,
    particle_number_direct,
    particle_number_poisson,
    solve_fugacity,
)
from .geometry import ConvexDomain, coarea_integral, coarea_upper_bound, distance_density
from .heat_kernel import (
    KernelValue,
    TraceQuery,
    box_trace,
    box_trace_prime,
    brown_envelope,
    bulk_kernel,
    diag_kernel_box,
    interval_trace,
)
from .specfun import (
    SpecFunConfig,
    bessel_i_scaled,
    bessel_k,
    bose_g,
    residual_gr6682,
    residual_i1_identity,
    residual_k_integral_rep,
)

__version__ = "0.1.0"
