"""Solving on nested truncations of an unbounded thin strip.

The strip is exhausted by rectangles (-L_k/2, L_k/2) x (-w, w) with
increasing lengths.  Solutions grow monotonically across truncations on the
shared nodes, their sup norms stay bounded by the (d^2/8)-chain with
d = 2w independent of L, and on a fixed central window they form a Cauchy
sequence — the computable shadow of convergence on compacta.

Discontinuous nonlinearity kinds are rejected here: the strip existence
argument needs Hoelder-continuous data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ExhaustionError
from .grids import Grid, truncate_strip
from .iteration import LinearSolveSettings, Solution, StoppingCriteria, run
from .subsolution import build_subsolution
from .systems import SystemTemplate


@dataclass(frozen=True)
class ExhaustionPlan:
    """Strictly increasing truncation lengths on a common node-aligned lattice.

    The measurement window is the central half of the smallest truncation.
    """

    strip_halfwidth: float
    lengths: tuple[float, ...]
    spacing: float

    def __post_init__(self):
        if len(self.lengths) < 2:
            raise ExhaustionError("an exhaustion needs at least two truncation lengths")
        if any(b <= a for a, b in zip(self.lengths, self.lengths[1:])):
            raise ExhaustionError("truncation lengths must be strictly increasing")
        if self.lengths[0] < 4.0 * self.strip_halfwidth:
            raise ExhaustionError(
                f"smallest length {self.lengths[0]} must be >= 4*halfwidth = "
                f"{4.0 * self.strip_halfwidth}"
            )
        for L in self.lengths:
            steps = L / self.spacing
            if abs(steps - round(steps)) > 1e-9 * max(1.0, steps) or round(steps) % 2:
                raise ExhaustionError(
                    f"length {L} must be an even number of spacings so grids align node-wise"
                )

    @property
    def window_halflength(self) -> float:
        return self.lengths[0] / 4.0


@dataclass
class TruncationRun:
    length: float
    grid: Grid
    solution: Solution
    end_band_sup: float  # sup of the solution within 2 spacings of the short ends


@dataclass
class ExhaustionResult:
    plan: ExhaustionPlan
    runs: list[TruncationRun]
    monotone_margins: list[float]  # min over common nodes of u_{k+1} - u_k
    window_deltas: list[float]     # max over window nodes of |u_{k+1} - u_k|
    sup_norm_spread: float         # max pairwise gap of the truncation sup norms

    def summary(self) -> dict:
        return {
            "lengths": list(self.plan.lengths),
            "sup_norms": [max(r.solution.sup_norms) for r in self.runs],
            "iterations": [r.solution.iterations for r in self.runs],
            "monotone_margins": self.monotone_margins,
            "window_deltas": self.window_deltas,
            "window_deltas_decreasing": _strictly_decreasing(self.window_deltas),
            "sup_norm_spread": self.sup_norm_spread,
            "end_band_sups": [r.end_band_sup for r in self.runs],
        }


def _strictly_decreasing(xs: list[float]) -> bool:
    return all(b < a for a, b in zip(xs, xs[1:]))


def run_exhaustion(
    plan: ExhaustionPlan,
    spec_template: SystemTemplate,
    criteria: StoppingCriteria | None = None,
    delta: float = 1.0,
    settings: LinearSolveSettings | None = None,
) -> ExhaustionResult:
    """Solve on every truncation and verify the cross-truncation structure.

    Raises when a truncation fails to converge or when a solution decreases
    (beyond solver slack) on the shared nodes of the next truncation.
    """
    if criteria is None:
        criteria = StoppingCriteria()
    for nl in spec_template.nonlinearities:
        if nl.jump_thresholds:
            raise ExhaustionError(
                f"nonlinearity kind {nl.kind!r} is discontinuous; strip exhaustion "
                "requires Hoelder-continuous data"
            )
    q = spec_template.ball.center
    if abs(q[0]) + 2.0 * spec_template.ball.rho >= plan.lengths[0] / 2.0:
        raise ExhaustionError("positivity ball must sit inside the smallest truncation")

    runs: list[TruncationRun] = []
    for L in plan.lengths:
        grid = truncate_strip(plan.strip_halfwidth, L, plan.spacing)
        spec = spec_template.instantiate(grid)
        cert = build_subsolution(grid, spec, delta)
        sol = run(grid, spec, cert, criteria, settings)
        if not sol.converged:
            raise ExhaustionError(
                f"truncation L = {L} did not converge within {criteria.max_iters} iterations"
            )
        xs = grid.xs
        end_band = (np.abs(np.abs(xs) - L / 2.0) <= 2.0 * plan.spacing + 1e-12)
        end_sup = max(float(np.abs(f.values[end_band, :]).max()) for f in sol.fields)
        runs.append(TruncationRun(length=L, grid=grid, solution=sol, end_band_sup=end_sup))

    margins: list[float] = []
    deltas: list[float] = []
    tol_slack = 10.0 * criteria.tol_step
    for small, big in zip(runs, runs[1:]):
        offset = round((big.length - small.length) / (2.0 * plan.spacing))
        nxs = small.grid.dims[0]
        margin = np.inf
        wdelta = 0.0
        window = np.abs(small.grid.xs) <= plan.window_halflength + 1e-12
        for f_small, f_big in zip(small.solution.fields, big.solution.fields):
            shared = f_big.values[offset : offset + nxs, :]
            diff = shared - f_small.values
            margin = min(margin, float(diff.min()))
            wdelta = max(wdelta, float(np.abs(diff[window, :]).max()))
        if margin < -tol_slack:
            raise ExhaustionError(
                f"solution on L = {small.length} exceeds the one on L = {big.length} "
                f"by {-margin:.3e} on shared nodes (allowed {tol_slack:.1e})"
            )
        margins.append(margin)
        deltas.append(wdelta)

    sups = [max(r.solution.sup_norms) for r in runs]
    return ExhaustionResult(
        plan=plan,
        runs=runs,
        monotone_margins=margins,
        window_deltas=deltas,
        sup_norm_spread=float(max(sups) - min(sups)),
    )


@dataclass
class BoundaryDecayReport:
    """Quantitative boundary-decay scan: for each epsilon, every node within
    r = epsilon/(2D) of the long-side boundary must have |u| < epsilon."""

    epsilons: tuple[float, ...]
    passed: dict
    largest_passing: float | None

    def to_dict(self) -> dict:
        return {
            "epsilons": list(self.epsilons),
            "passed": {repr(e): bool(v) for e, v in self.passed.items()},
            "largest_passing": self.largest_passing,
        }


def boundary_decay_check(
    solution: Solution,
    D: float,
    epsilons: tuple[float, ...] = (1e-1, 1e-2, 1e-3),
) -> BoundaryDecayReport:
    """Check |u| < epsilon on the band within epsilon/(2D) of the strip's
    long sides, for each epsilon on the grid; report-only."""
    if D <= 0.0:
        raise ExhaustionError("decay check needs a positive sup-norm bound D")
    grid = solution.grid
    ys = grid.ys
    y_lo, y_hi = ys[0], ys[-1]
    dist_to_wall = np.minimum(ys - y_lo, y_hi - ys)
    passed = {}
    for eps in epsilons:
        r = eps / (2.0 * D)
        band = dist_to_wall <= r + 1e-15
        worst = max(float(np.abs(f.values[:, band]).max()) for f in solution.fields)
        passed[eps] = worst < eps
    ok = [e for e in epsilons if passed[e]]
    return BoundaryDecayReport(
        epsilons=tuple(epsilons),
        passed=passed,
        largest_passing=max(ok) if ok else None,
    )
