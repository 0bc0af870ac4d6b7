"""Monotone iteration u_{j,k+1} = (-lap)^{-1}(lambda_j f_j(u_k)) with
enforced monotonicity, boundedness and convergence diagnostics.

Starting every component from the same subsolution h, cooperativity plus
the discrete maximum principle force the iterates upward node-wise; the
engine treats a decrease beyond solver slack, a violated sup-norm bound or
an escaped a-priori bound as hard failures rather than warnings, since each
would falsify the method's correctness argument.

Boundedness comes from one of two declared routes:

* growth path: the sublinear envelope gives a trace cap via the scalar
  recursion  S_{k+1} <= gamma (1 + S_k)^p  (gamma collects 2(n+1), d^2/8,
  Lambda_upper and the envelope constants);
* fixed-point path: for a single equation, the smallest positive solution
  of (d^2/8) * lambda * f(x) = x caps every iterate's sup norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    BoundUnavailableError,
    BoundViolationError,
    MonotonicityError,
    SpecValidationError,
    SubsolutionError,
)
from .grids import Grid, ScalarField
from .poisson import (
    DEFAULT_TAU_LIN,
    LinearSolveSettings,
    check_sup_bound,
    default_settings,
    make_rhs,
    neg_laplacian_values,
    solve_dirichlet,
)
from .subsolution import SubsolutionCertificate
from .systems import SystemSpec, evaluate_f_fields


@dataclass(frozen=True)
class StoppingCriteria:
    """Sup-norm stopping rule: successive difference AND nonlinear residual."""

    tol_step: float = 1e-8
    tol_residual: float = 1e-8
    max_iters: int = 500

    def __post_init__(self):
        if not (self.tol_step > 0.0 and self.tol_residual > 0.0):
            raise SpecValidationError("stopping tolerances must be positive")
        if self.max_iters < 1:
            raise SpecValidationError("max_iters must be >= 1")

    def tau_lin(self) -> float:
        """Linear tolerance pinned two orders below the nonlinear ones."""
        return min(DEFAULT_TAU_LIN, self.tol_step / 100.0, self.tol_residual / 100.0)


@dataclass
class IterationState:
    """Fields u_{., k} plus step diagnostics (None where k = 0 has no previous)."""

    k: int
    fields: tuple[ScalarField, ...]
    sup_norms: tuple[float, ...]
    step_delta: float | None
    monotonicity_margin: float | None
    nonlinear_residual: float
    rhs_sup: float  # max_l ||lambda_l f_l|| of the rhs that produced this state
    _rhs: tuple[np.ndarray, ...] | None = dataclass_field(default=None, repr=False)


@dataclass(frozen=True)
class IterationDiagnostics:
    k: int
    sup_norms: tuple[float, ...]
    step_delta: float | None
    monotonicity_margin: float | None
    nonlinear_residual: float
    rhs_sup: float

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "sup_norms": list(self.sup_norms),
            "step_delta": self.step_delta,
            "monotonicity_margin": self.monotonicity_margin,
            "nonlinear_residual": self.nonlinear_residual,
            "rhs_sup": self.rhs_sup,
        }


@dataclass
class Solution:
    """Converged (or flagged) result of a monotone run with its full trace."""

    grid: Grid
    fields: list[ScalarField]
    converged: bool
    iterations: int
    trace: list[IterationDiagnostics]
    info: dict

    @property
    def sup_norms(self) -> list[float]:
        return [f.sup_norm for f in self.fields]


def _nodal_rhs(grid: Grid, spec: SystemSpec, arrays: Sequence[np.ndarray]) -> list[np.ndarray]:
    mask = grid.interior_mask
    out = []
    for l in range(spec.n_plus_1):
        vals = spec.lambda_fields[l].values * evaluate_f_fields(spec, l, arrays)
        out.append(np.where(mask, vals, 0.0))
    return out


def _residual(grid: Grid, arrays: Sequence[np.ndarray], rhs: Sequence[np.ndarray]) -> float:
    mask = grid.interior_mask
    worst = 0.0
    for u, r in zip(arrays, rhs):
        lap = neg_laplacian_values(grid, u)
        worst = max(worst, float(np.abs(lap[mask] - r[mask]).max()))
    return worst


def initial_state(grid: Grid, spec: SystemSpec, certificate: SubsolutionCertificate) -> IterationState:
    """State k = 0 with every component set to the subsolution."""
    h = certificate.field.values
    arrays = [h.copy() for _ in range(spec.n_plus_1)]
    rhs = _nodal_rhs(grid, spec, arrays)
    return IterationState(
        k=0,
        fields=tuple(ScalarField(grid, a) for a in arrays),
        sup_norms=tuple(float(np.abs(a[grid.interior_mask]).max()) for a in arrays),
        step_delta=None,
        monotonicity_margin=None,
        nonlinear_residual=_residual(grid, arrays, rhs),
        rhs_sup=max(float(np.abs(r).max()) for r in rhs),
        _rhs=tuple(rhs),
    )


def iterate_once(
    grid: Grid,
    spec: SystemSpec,
    state: IterationState,
    settings: LinearSolveSettings | None = None,
) -> IterationState:
    """One sweep: solve the n+1 independent Dirichlet problems with the
    right-hand sides frozen at the previous state."""
    if settings is None:
        settings = default_settings(grid)
    prev = [f.values for f in state.fields]
    rhs = list(state._rhs) if state._rhs is not None else _nodal_rhs(grid, spec, prev)
    new_fields = []
    for l in range(spec.n_plus_1):
        u = solve_dirichlet(grid, make_rhs(grid, rhs[l]), settings)
        new_fields.append(u)
    new_arrays = [f.values for f in new_fields]
    margin = min(float((n - p).min()) for n, p in zip(new_arrays, prev))
    delta = max(float(np.abs(n - p).max()) for n, p in zip(new_arrays, prev))
    next_rhs = _nodal_rhs(grid, spec, new_arrays)
    return IterationState(
        k=state.k + 1,
        fields=tuple(new_fields),
        sup_norms=tuple(f.sup_norm for f in new_fields),
        step_delta=delta,
        monotonicity_margin=margin,
        nonlinear_residual=_residual(grid, new_arrays, next_rhs),
        rhs_sup=max(float(np.abs(r).max()) for r in rhs),
        _rhs=tuple(next_rhs),
    )


# ---------------------------------------------------------------------------
# a-priori bounds
# ---------------------------------------------------------------------------

def apriori_bound(spec: SystemSpec, slab_diameter: float) -> float:
    """Closed-form fixed point x* of x = 2(n+1) c Lambda B x^p with
    c = d^2/8, B = max growth constant with A folded in, p = max exponent.

    x* caps 1 + sum_l ||u_l|| for iterates started small; when x* < 1 the
    padding has degenerated and the enforced trace cap takes over.
    """
    if spec.growth is None:
        raise BoundUnavailableError("a-priori bound needs a declared growth envelope")
    c = slab_diameter**2 / 8.0
    B = max(spec.growth.max_constant, spec.growth.A)
    p = spec.growth.max_exponent
    gamma = 2.0 * spec.n_plus_1 * c * spec.lambda_upper * B
    return gamma ** (1.0 / (1.0 - p))


def padded_trace_cap(spec: SystemSpec, slab_diameter: float, start_sum: float) -> float:
    """Enforceable bound on sum_l ||u_{l,k}||: the iteration's sup-norm sums
    obey S_{k+1} <= gamma (1 + S_k)^p, whose fixed point M* attracts from
    above and below, so max(S_0, M*) can never be exceeded."""
    if spec.growth is None:
        raise BoundUnavailableError("trace cap needs a declared growth envelope")
    c = slab_diameter**2 / 8.0
    B = max(spec.growth.max_constant, spec.growth.A)
    p = spec.growth.max_exponent
    gamma = 2.0 * spec.n_plus_1 * c * spec.lambda_upper * B
    def psi(m: float) -> float:
        return gamma * (1.0 + m) ** p

    hi = 1.0
    while psi(hi) > hi:
        hi *= 2.0
        if hi > 1e300:
            raise BoundViolationError("padded trace recursion does not close")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if psi(mid) > mid:
            lo = mid
        else:
            hi = mid
    m_star = hi
    return max(start_sum, m_star)


def fixed_point_bound(
    nonlinearity: Callable[[float], float],
    lambda_const: float,
    slab_diameter: float,
    x_max: float = 50.0,
    bracket_width: float = 1e-12,
) -> float | None:
    """Smallest positive solution of (d^2/8) * lambda * f(x) = x, found by a
    sign-change scan on [1e-12, x_max] plus bisection; None when the scan
    finds no crossing (condition (a') then cannot be certified)."""
    c = slab_diameter**2 / 8.0 * lambda_const

    def g(x: float) -> float:
        return c * float(nonlinearity(x)) - x

    xs = np.concatenate(
        [np.geomspace(1e-12, min(1.0, x_max), 2048), np.linspace(min(1.0, x_max), x_max, 2048)]
    )
    vals = np.array([g(float(x)) for x in xs])
    zero_hits = np.nonzero(vals == 0.0)[0]
    crossings = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    first_zero = xs[zero_hits[0]] if zero_hits.size else math.inf
    if crossings.size == 0:
        return float(first_zero) if math.isfinite(first_zero) else None
    a, b = float(xs[crossings[0]]), float(xs[crossings[0] + 1])
    if first_zero < a:
        return float(first_zero)
    fa = g(a)
    while b - a > bracket_width:
        midpoint = 0.5 * (a + b)
        fm = g(midpoint)
        if fm == 0.0:
            return midpoint
        if fa * fm < 0.0:
            b = midpoint
        else:
            a, fa = midpoint, fm
    return 0.5 * (a + b)


def scalar_nonlinearity(spec: SystemSpec) -> Callable[[float], float]:
    """The single equation's f as a plain scalar function (fixed-point path)."""
    if spec.n_plus_1 != 1:
        raise SpecValidationError("scalar nonlinearity only exists for single-equation systems")
    nl = spec.nonlinearities[0]
    return lambda x: float(nl.evaluate([x]))


# ---------------------------------------------------------------------------
# the run loop
# ---------------------------------------------------------------------------

def run(
    grid: Grid,
    spec: SystemSpec,
    certificate: SubsolutionCertificate,
    criteria: StoppingCriteria | None = None,
    settings: LinearSolveSettings | None = None,
    fixed_point_x_max: float = 50.0,
) -> Solution:
    """Iterate from the subsolution until step and residual drop below the
    stopping tolerances, enforcing the monotone/bounded invariants.

    Returns a flagged (converged=False) partial result when max_iters is
    reached; raises on monotonicity or bound violations.
    """
    if criteria is None:
        criteria = StoppingCriteria()
    tau = criteria.tau_lin()
    if settings is None:
        settings = default_settings(grid, tolerance=tau)
    elif settings.tolerance > min(criteria.tol_step, criteria.tol_residual) / 100.0:
        raise SpecValidationError(
            "linear tolerance must sit two orders below the nonlinear tolerances"
        )
    if certificate.field.grid is not grid or spec.grid is not grid:
        raise SpecValidationError("grid, system and certificate are not aligned")

    d = grid.slab_diameter
    n1 = spec.n_plus_1
    info: dict = {
        "slab_diameter": d,
        "lambda_lower": spec.ball.lambda_lower,
        "lambda_upper": spec.lambda_upper,
        "tau_lin": settings.tolerance,
    }
    if spec.growth is not None:
        start_sum = n1 * certificate.sup_h
        info["apriori_x_star"] = apriori_bound(spec, d)
        info["trace_cap"] = padded_trace_cap(spec, d, start_sum)
        info["fixed_point_x0"] = None
    else:
        if n1 != 1:
            raise BoundUnavailableError(
                "without a growth envelope only single-equation systems can run "
                "(positive-fixed-point path)"
            )
        x0 = fixed_point_bound(scalar_nonlinearity(spec), spec.lambda_upper, d, fixed_point_x_max)
        if x0 is None:
            raise BoundUnavailableError(
                "no positive fixed point of (d^2/8)*lambda*f(x) found on (0, 50]; "
                "condition (a') cannot be certified for this system"
            )
        if certificate.sup_h >= x0:
            raise SubsolutionError(
                f"||h|| = {certificate.sup_h:.3e} must start below the fixed point x0 = {x0:.3e}; "
                "rebuild the subsolution with a smaller delta"
            )
        info["apriori_x_star"] = None
        info["trace_cap"] = None
        info["fixed_point_x0"] = x0

    state = initial_state(grid, spec, certificate)
    trace = [_diag(state)]
    converged = False
    for _ in range(criteria.max_iters):
        state = iterate_once(grid, spec, state, settings)
        trace.append(_diag(state))
        _enforce_invariants(state, spec, certificate, d, tau, info)
        if state.step_delta < criteria.tol_step and state.nonlinear_residual < criteria.tol_residual:
            converged = True
            break

    h = certificate.field.values
    slack = 10.0 * tau * max(state.rhs_sup, 1.0)
    low = min(float((f.values - h).min()) for f in state.fields)
    if low < -slack:
        raise MonotonicityError(
            f"final fields dip {low:.3e} below the subsolution (allowed slack {slack:.1e})"
        )
    if max(state.sup_norms) < certificate.sup_h - slack:
        raise MonotonicityError("converged solution is trivial (below the subsolution scale)")

    info["iterations"] = state.k
    info["final_step_delta"] = state.step_delta
    info["final_residual"] = state.nonlinear_residual
    return Solution(
        grid=grid,
        fields=list(state.fields),
        converged=converged,
        iterations=state.k,
        trace=trace,
        info=info,
    )


def _diag(state: IterationState) -> IterationDiagnostics:
    return IterationDiagnostics(
        k=state.k,
        sup_norms=state.sup_norms,
        step_delta=state.step_delta,
        monotonicity_margin=state.monotonicity_margin,
        nonlinear_residual=state.nonlinear_residual,
        rhs_sup=state.rhs_sup,
    )


def _enforce_invariants(
    state: IterationState,
    spec: SystemSpec,
    certificate: SubsolutionCertificate,
    d: float,
    tau: float,
    info: dict,
) -> None:
    # The first step inherits the certificate's nodal slack through the
    # inverse operator; later steps are exact M-matrix comparisons.
    allowed = 10.0 * tau * max(state.rhs_sup, 1.0) + d * d / 8.0 * certificate.max_violation
    if state.monotonicity_margin < -allowed:
        raise MonotonicityError(
            f"iteration {state.k}: margin {state.monotonicity_margin:.3e} "
            f"below allowed {-allowed:.3e}"
        )
    bound = d * d / 8.0 * state.rhs_sup + 10.0 * tau * state.rhs_sup
    if max(state.sup_norms) > bound:
        raise BoundViolationError(
            f"iteration {state.k}: sup norm {max(state.sup_norms):.6e} exceeds "
            f"(d^2/8)*||rhs|| = {bound:.6e}"
        )
    slack = 10.0 * tau * max(state.rhs_sup, 1.0)
    if info.get("trace_cap") is not None:
        if sum(state.sup_norms) > info["trace_cap"] + slack:
            raise BoundViolationError(
                f"iteration {state.k}: sum of sup norms {sum(state.sup_norms):.6e} "
                f"escaped the a-priori trace cap {info['trace_cap']:.6e}"
            )
    if info.get("fixed_point_x0") is not None:
        if max(state.sup_norms) > info["fixed_point_x0"] + slack:
            raise BoundViolationError(
                f"iteration {state.k}: sup norm exceeds the fixed-point bound "
                f"x0 = {info['fixed_point_x0']:.6e}"
            )


def check_solution_bounds(solution: Solution, spec: SystemSpec) -> dict:
    """Re-derive the per-step sup-norm bound checks from the recorded trace;
    used for reporting."""
    d = solution.info["slab_diameter"]
    tau = solution.info["tau_lin"]
    worst_ratio = 0.0
    for diag in solution.trace[1:]:
        bound = d * d / 8.0 * diag.rhs_sup
        if bound > 0.0:
            worst_ratio = max(worst_ratio, max(diag.sup_norms) / (bound + 10 * tau * diag.rhs_sup))
    return {
        "max_sup_over_dmp_bound": worst_ratio,
        "trace_cap": solution.info.get("trace_cap"),
        "apriori_x_star": solution.info.get("apriori_x_star"),
        "fixed_point_x0": solution.info.get("fixed_point_x0"),
    }


def damped_solve(
    grid: Grid,
    spec: SystemSpec,
    start_value: float,
    damping: float = 0.5,
    tol: float = 1e-10,
    max_iters: int = 5000,
    settings: LinearSolveSettings | None = None,
) -> list[ScalarField]:
    """Independent cross-check: damped Picard iteration
    u <- (1-theta) u + theta (-lap)^{-1}(lambda f(u)) from a constant
    interior start.  Not monotone; used to confirm the monotone limit."""
    if settings is None:
        settings = default_settings(grid)
    mask = grid.interior_mask
    arrays = [np.where(mask, float(start_value), 0.0) for _ in range(spec.n_plus_1)]
    for _ in range(max_iters):
        rhs = _nodal_rhs(grid, spec, arrays)
        new_arrays = []
        for l in range(spec.n_plus_1):
            u = solve_dirichlet(grid, make_rhs(grid, rhs[l]), settings)
            new_arrays.append((1.0 - damping) * arrays[l] + damping * u.values)
        delta = max(float(np.abs(n - p).max()) for n, p in zip(new_arrays, arrays))
        arrays = new_arrays
        if delta < tol:
            break
    return [ScalarField(grid, a) for a in arrays]
