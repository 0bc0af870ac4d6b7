"""Constructive solver for weakly coupled cooperative sublinear elliptic
systems -lap(u_l) = lambda_l(x) f_l(u_0, ..., u_n) with zero Dirichlet data,
on bounded 2-D domains and truncations of unbounded thin strips.

The method is subsolution-initialized monotone (Picard) iteration on a
5-point finite-difference grid whose M-matrix structure makes the maximum
principle — and with it the method's correctness argument — hold exactly at
the discrete level.
"""

from .errors import (
    BoundUnavailableError,
    BoundViolationError,
    ConfigError,
    ExhaustionError,
    FieldError,
    GridError,
    LinearSolveError,
    MaximumPrincipleError,
    MonotoneEllipticError,
    MonotonicityError,
    SpecValidationError,
    SubsolutionError,
)
from .exhaustion import (
    BoundaryDecayReport,
    ExhaustionPlan,
    ExhaustionResult,
    boundary_decay_check,
    run_exhaustion,
)
from .grids import (
    Grid,
    ScalarField,
    build_interval,
    build_masked,
    build_rectangle,
    read_field_csv,
    read_fields_binary,
    truncate_strip,
    write_field_csv,
    write_fields_binary,
)
from .iteration import (
    IterationDiagnostics,
    IterationState,
    Solution,
    StoppingCriteria,
    apriori_bound,
    damped_solve,
    fixed_point_bound,
    initial_state,
    iterate_once,
    padded_trace_cap,
    run,
    scalar_nonlinearity,
)
from .poisson import (
    LinearSolveSettings,
    SupBoundReport,
    check_sup_bound,
    default_settings,
    make_rhs,
    neg_laplacian_values,
    residual_sup,
    solve_dirichlet,
)
from .subsolution import (
    SubsolutionCertificate,
    build_subsolution,
    bump_laplacian,
    bump_value,
    chain_violations,
    choose_eta,
    estimate_C,
)
from .systems import (
    ConditionReport,
    GrowthEnvelope,
    LeftContinuousStep,
    LowerEnvelope,
    Nonlinearity,
    PositivityBall,
    PowerExp,
    PowerProduct,
    PowerSum,
    SystemSpec,
    SystemTemplate,
    TabulatedMonotone,
    evaluate_f,
    evaluate_f_fields,
    make_system,
    validate_system,
    verify_continuity_from_below,
    verify_cooperative,
    verify_growth,
    verify_lower_envelope,
)

__version__ = "0.1.0"
