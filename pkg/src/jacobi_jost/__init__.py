"""Jost solutions, polynomial asymptotics, and spectral data for semi-infinite
Jacobi matrices with fast-growing off-diagonal entries (sum 1/a_n < inf),
plus the classical-growth analogue with z-dependent phases.
"""

__version__ = "0.1.0"

from .coefficients import (  # noqa: F401
    Geometric,
    ParityPerturbed,
    PowerLaw,
    Regime,
    RegimeKind,
    Stretched,
    Tabulated,
    check_essential_selfadjointness,
    classify,
    derived,
    ell1_diagnostics,
    eps_tail,
    eval_a,
    eval_b,
    model_from_dict,
    model_hash,
    model_to_dict,
)
from .errors import (  # noqa: F401
    DegenerateWronskian,
    InconsistentTail,
    JacobiJostError,
    ModelError,
    NearCritical,
    NotConverged,
    PoleAtZ,
    PrecisionError,
    RegimeMismatch,
    TailNotSummable,
    UnsupportedRegime,
    ZeroCrossing,
)
from .logscale import LogComplex  # noqa: F401
from .ansatz import AnsatzTable, build_table, remainder_r, zeta_root  # noqa: F401
from .volterra import (  # noqa: F401
    JostBundle,
    USolution,
    VolterraKernel,
    jost_f,
    jost_pair,
    kernel_G,
    neumann_u,
    solve_u,
)
from .solutions import (  # noqa: F401
    IdentityReport,
    KappaFit,
    SolutionSeq,
    fit_k_coeffs,
    growing_g,
    growing_limit,
    identity_kappa,
    orthonormal_polys,
    poly_prefactor_supercritical,
    recurrence_solve,
    scattering_kappa,
    second_kind_polys,
    wronskian,
    wronskian_constancy,
)
from .spectral import (  # noqa: F401
    EigenResult,
    MassResult,
    OmegaResult,
    find_eigenvalues,
    finite_section_eigs,
    jost_function,
    resolvent_entry,
    spectral_mass,
    spectral_report,
)
from .carleman import (  # noqa: F401
    CarlemanAnsatz,
    ac_spectral_density,
    carleman_jost,
    carleman_table,
    omega_carleman,
    omega_extrapolated,
    poly_from_jost,
    sine_model,
)
