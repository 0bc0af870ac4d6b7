"""System definitions: nonlinearities f_l, coefficients lambda_l, and the
structural conditions they must satisfy.

The solvable class is pinned down by four conditions on the f_l:

(a) sublinear growth ``|f_l(z)| <= C_{l,j} |z_j|^{p_{l,j}} + A`` with
    exponents in (0,1), declared per coordinate (:class:`GrowthEnvelope`);
(b) a power lower envelope ``f_l(z) >= sum_j A_{l,j} |z_j|^{alpha_{l,j}}``
    near the origin (:class:`LowerEnvelope`), which is what seeds the
    iteration;
(c) cooperativity: f_l nondecreasing in every argument;
(d) continuity along nondecreasing sequences, which admits left-continuous
    jumps.

Conditions are checked by seeded randomized sampling, not symbolically:
f_l is user-declared data, and sampling gives falsification power without
a symbolic engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.typing import NDArray

from .errors import SpecValidationError
from .grids import Grid, ScalarField


# ---------------------------------------------------------------------------
# nonlinearity kinds
# ---------------------------------------------------------------------------

class Nonlinearity:
    """One component function f_l(z_0, ..., z_n).

    ``evaluate`` takes a sequence of n+1 scalars or broadcastable arrays and
    is vectorised componentwise.  ``jump_thresholds`` lists (argument index,
    threshold) pairs for discontinuous kinds so the condition-(d) checker can
    aim at them.
    """

    kind: str = "custom"
    jump_thresholds: tuple[tuple[int, float], ...] = ()

    def evaluate(self, z: Sequence):
        raise NotImplementedError

    def check_arity(self, n_plus_1: int) -> None:
        """Raise if the function cannot consume n+1 arguments."""

    def describe(self) -> dict:
        return {"kind": self.kind}


@dataclass
class PowerProduct(Nonlinearity):
    """Single-coordinate power |z_target|^exponent (the Lane-Emden coupling)."""

    target: int = 0
    exponent: float = 0.5

    def __post_init__(self):
        self.kind = "power_product"
        if not 0.0 < self.exponent < 1.0:
            raise SpecValidationError(
                f"power_product exponent must be in (0, 1), got {self.exponent}"
            )

    def evaluate(self, z):
        return np.abs(z[self.target]) ** self.exponent

    def check_arity(self, n_plus_1):
        if not 0 <= self.target < n_plus_1:
            raise SpecValidationError(f"power_product target {self.target} out of range")

    def describe(self):
        return {"kind": self.kind, "target": self.target, "exponent": self.exponent}


@dataclass
class PowerSum(Nonlinearity):
    """sum_j coeffs[j] * |z_j|^exponents[j] with nonnegative coefficients."""

    coeffs: Sequence[float] = (1.0,)
    exponents: Sequence[float] = (0.5,)

    def __post_init__(self):
        self.kind = "power_sum"
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        self.exponents = np.asarray(self.exponents, dtype=float)
        if self.coeffs.shape != self.exponents.shape:
            raise SpecValidationError("power_sum coeffs and exponents must have equal length")
        if (self.coeffs < 0.0).any():
            raise SpecValidationError("power_sum coefficients must be nonnegative")
        if ((self.exponents <= 0.0) | (self.exponents >= 1.0)).any():
            raise SpecValidationError("power_sum exponents must be in (0, 1)")

    def evaluate(self, z):
        parts = [
            a * np.abs(zj) ** alpha
            for a, alpha, zj in zip(self.coeffs, self.exponents, z)
            if a != 0.0
        ]
        if not parts:
            return np.zeros_like(np.asarray(z[0], dtype=float))
        return sum(parts)

    def check_arity(self, n_plus_1):
        if len(self.coeffs) != n_plus_1:
            raise SpecValidationError(
                f"power_sum declares {len(self.coeffs)} terms for a {n_plus_1}-component system"
            )

    def describe(self):
        return {
            "kind": self.kind,
            "coeffs": list(map(float, self.coeffs)),
            "exponents": list(map(float, self.exponents)),
        }


@dataclass
class PowerExp(Nonlinearity):
    """x^s * exp(x^m) of one coordinate; superlinear, so it is admitted only
    through the positive-fixed-point path, never through a growth envelope."""

    s: float = 0.5
    m: float = 1.0
    target: int = 0

    def __post_init__(self):
        self.kind = "power_exp"
        if not 0.0 < self.s < 1.0:
            raise SpecValidationError(f"power_exp exponent s must be in (0, 1), got {self.s}")
        if not self.m > 0.0:
            raise SpecValidationError(f"power_exp exponent m must be positive, got {self.m}")

    def evaluate(self, z):
        x = np.abs(z[self.target])
        return x**self.s * np.exp(x**self.m)

    def check_arity(self, n_plus_1):
        if not 0 <= self.target < n_plus_1:
            raise SpecValidationError(f"power_exp target {self.target} out of range")

    def describe(self):
        return {"kind": self.kind, "s": self.s, "m": self.m, "target": self.target}


@dataclass
class LeftContinuousStep(Nonlinearity):
    """Power term plus a left-open jump:
    ``power_coeff * |z_pt|^power_exponent + offset + jump * [z_st > threshold]``.

    The step is open on the left (value ``offset`` for z <= threshold), so
    the function is continuous along nondecreasing sequences (condition (d)).
    """

    power_coeff: float = 1.0
    power_exponent: float = 0.5
    power_target: int = 0
    offset: float = 0.0
    jump: float = 0.0
    threshold: float = 1.0
    step_target: int = 0

    def __post_init__(self):
        self.kind = "left_continuous_step"
        if not 0.0 < self.power_exponent < 1.0:
            raise SpecValidationError("step power exponent must be in (0, 1)")
        if self.power_coeff < 0.0 or self.offset < 0.0 or self.jump < 0.0:
            raise SpecValidationError("step coefficients must be nonnegative")
        if not self.threshold > 0.0:
            raise SpecValidationError("step threshold must be positive")
        self.jump_thresholds = ((self.step_target, self.threshold),)

    def evaluate(self, z):
        base = self.power_coeff * np.abs(z[self.power_target]) ** self.power_exponent
        step = np.asarray(z[self.step_target]) > self.threshold
        return base + self.offset + self.jump * step

    def check_arity(self, n_plus_1):
        if not (0 <= self.power_target < n_plus_1 and 0 <= self.step_target < n_plus_1):
            raise SpecValidationError("left_continuous_step target out of range")

    def describe(self):
        return {
            "kind": self.kind,
            "power_coeff": self.power_coeff,
            "power_exponent": self.power_exponent,
            "power_target": self.power_target,
            "offset": self.offset,
            "jump": self.jump,
            "threshold": self.threshold,
            "step_target": self.step_target,
        }


@dataclass
class TabulatedMonotone(Nonlinearity):
    """User-tabulated nondecreasing function of |z_target| with linear
    interpolation; clamped flat outside the table."""

    xs: Sequence[float] = (0.0, 1.0)
    ys: Sequence[float] = (0.0, 1.0)
    target: int = 0

    def __post_init__(self):
        self.kind = "custom_table"
        self.xs = np.asarray(self.xs, dtype=float)
        self.ys = np.asarray(self.ys, dtype=float)
        if self.xs.ndim != 1 or self.xs.size < 2 or self.xs.shape != self.ys.shape:
            raise SpecValidationError("custom_table needs matching 1-D xs/ys with >= 2 entries")
        if (np.diff(self.xs) <= 0.0).any():
            raise SpecValidationError("custom_table xs must be strictly increasing")
        if (np.diff(self.ys) < 0.0).any():
            raise SpecValidationError("custom_table ys must be nondecreasing")
        if (self.ys < 0.0).any():
            raise SpecValidationError("custom_table values must be nonnegative")

    def evaluate(self, z):
        return np.interp(np.abs(z[self.target]), self.xs, self.ys)

    def check_arity(self, n_plus_1):
        if not 0 <= self.target < n_plus_1:
            raise SpecValidationError(f"custom_table target {self.target} out of range")

    def describe(self):
        return {"kind": self.kind, "xs": list(map(float, self.xs)),
                "ys": list(map(float, self.ys)), "target": self.target}


NONLINEARITY_KINDS = {
    "power_product": PowerProduct,
    "power_sum": PowerSum,
    "power_exp": PowerExp,
    "left_continuous_step": LeftContinuousStep,
    "custom_table": TabulatedMonotone,
}


# ---------------------------------------------------------------------------
# envelopes
# ---------------------------------------------------------------------------

@dataclass
class GrowthEnvelope:
    """Condition (a) constants: per-coordinate bounds
    ``|f_l(z)| <= C[l, j] |z_j|^p[l, j] + A`` for the declared (finite-C)
    pairs; np.inf marks an undeclared pair.  Every row needs at least one
    declared bound."""

    C: NDArray[np.float64]
    p: NDArray[np.float64]
    A: float = 0.0

    def __post_init__(self):
        self.C = np.asarray(self.C, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        if self.C.ndim != 2 or self.C.shape != self.p.shape:
            raise SpecValidationError("growth envelope C and p must be equal-shape matrices")
        bad = np.argwhere((self.p <= 0.0) | (self.p >= 1.0))
        if bad.size:
            l, j = bad[0]
            raise SpecValidationError(
                f"condition (a) requires 0 < p_{{l,j}} < 1; got p[{l}][{j}] = {self.p[l, j]}"
            )
        if (np.nan_to_num(self.C, nan=-1.0) < 0.0).any():
            raise SpecValidationError("growth constants C must be nonnegative")
        if self.A < 0.0:
            raise SpecValidationError("growth constant A must be nonnegative")
        if not np.isfinite(self.C).any(axis=1).all():
            raise SpecValidationError(
                "condition (a): each row must declare at least one finite C_{l,j}"
            )

    @property
    def max_exponent(self) -> float:
        return float(self.p[np.isfinite(self.C)].max())

    @property
    def max_constant(self) -> float:
        return float(self.C[np.isfinite(self.C)].max())

    def bound(self, l: int, z: NDArray[np.float64]) -> NDArray[np.float64]:
        """min over declared j of C|z_j|^p + A, for samples z of shape (m, n+1)."""
        finite = np.isfinite(self.C[l])
        cols = np.nonzero(finite)[0]
        per_j = [self.C[l, j] * np.abs(z[:, j]) ** self.p[l, j] + self.A for j in cols]
        return np.min(per_j, axis=0)


@dataclass
class LowerEnvelope:
    """Condition (b) constants: ``f_l(z) >= sum_j A[l, j] |z_j|^alpha[l, j]``
    whenever all |z_j| < epsilon0; each row needs at least one A > 0."""

    A: NDArray[np.float64]
    alpha: NDArray[np.float64]
    epsilon0: float = 1.0

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        self.alpha = np.asarray(self.alpha, dtype=float)
        if self.A.ndim != 2 or self.A.shape != self.alpha.shape:
            raise SpecValidationError("lower envelope A and alpha must be equal-shape matrices")
        if (self.A < 0.0).any():
            raise SpecValidationError("lower envelope constants A must be nonnegative")
        if ((self.alpha <= 0.0) | (self.alpha >= 1.0)).any():
            raise SpecValidationError("condition (b) requires 0 < alpha_{l,j} < 1")
        if not (self.A > 0.0).any(axis=1).all():
            raise SpecValidationError(
                "condition (b): for each l at least one A_{l,j} must be nonzero"
            )
        if not self.epsilon0 > 0.0:
            raise SpecValidationError("epsilon0 must be positive")

    @property
    def A_min(self) -> float:
        """Smallest nonzero constant."""
        return float(self.A[self.A > 0.0].min())

    @property
    def max_alpha(self) -> float:
        """Largest exponent carrying a nonzero constant (inert rows ignored)."""
        return float(self.alpha[self.A > 0.0].max())

    def value(self, l: int, z: NDArray[np.float64]) -> NDArray[np.float64]:
        """Envelope value for samples z of shape (m, n+1)."""
        total = np.zeros(z.shape[0])
        for j in range(self.A.shape[1]):
            if self.A[l, j] > 0.0:
                total += self.A[l, j] * np.abs(z[:, j]) ** self.alpha[l, j]
        return total


@dataclass(frozen=True)
class PositivityBall:
    """Ball B_{2 rho}(q) on which every lambda_l is bounded below by
    lambda_lower > 0; this is where the subsolution bump will live."""

    center: tuple[float, float]
    rho: float
    lambda_lower: float

    def __post_init__(self):
        if not self.rho > 0.0:
            raise SpecValidationError("positivity ball radius rho must be positive")
        if not self.lambda_lower > 0.0:
            raise SpecValidationError("lambda lower bound must be positive")


# ---------------------------------------------------------------------------
# the system
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SystemSpec:
    """A validated (n+1)-component system on one grid.

    ``growth`` may be None, in which case boundedness of the iterates must
    come from the positive-fixed-point path (single equation only).
    """

    nonlinearities: tuple[Nonlinearity, ...]
    lambda_fields: tuple[ScalarField, ...]
    lower: LowerEnvelope
    ball: PositivityBall
    growth: GrowthEnvelope | None = None

    @property
    def n_plus_1(self) -> int:
        return len(self.nonlinearities)

    @property
    def grid(self) -> Grid:
        return self.lambda_fields[0].grid

    @property
    def lambda_upper(self) -> float:
        return max(f.sup_norm for f in self.lambda_fields)


def validate_system(spec: SystemSpec) -> SystemSpec:
    """Check the structural invariants tying the pieces together.

    Raises :class:`SpecValidationError` naming the violated condition.
    """
    n1 = spec.n_plus_1
    if n1 < 1:
        raise SpecValidationError("system needs at least one equation")
    if len(spec.lambda_fields) != n1:
        raise SpecValidationError(
            f"{n1} nonlinearities but {len(spec.lambda_fields)} lambda fields"
        )
    grid = spec.grid
    for lam in spec.lambda_fields:
        if lam.grid is not grid:
            raise SpecValidationError("lambda fields must share one grid")
        lam.assert_finite("lambda")
        if lam.values[grid.interior_mask].min() < 0.0:
            raise SpecValidationError("lambda_l must be nonnegative node-wise")
    if spec.lower.A.shape != (n1, n1):
        raise SpecValidationError(
            f"lower envelope shape {spec.lower.A.shape} does not match system size {n1}"
        )
    if spec.growth is not None and spec.growth.C.shape != (n1, n1):
        raise SpecValidationError(
            f"growth envelope shape {spec.growth.C.shape} does not match system size {n1}"
        )
    for nl in spec.nonlinearities:
        nl.check_arity(n1)
    ball = spec.ball
    X, Y = grid.node_coords()
    d2 = (X - ball.center[0]) ** 2 + (Y - ball.center[1]) ** 2
    in_ball = d2 <= (2.0 * ball.rho) ** 2
    if not in_ball.any():
        raise SpecValidationError("positivity ball contains no grid node")
    if (~grid.interior_mask & in_ball).any():
        raise SpecValidationError(
            "ball B_{2 rho}(q) must lie inside the domain "
            "(a non-interior node is within distance 2*rho of q)"
        )
    for l, lam in enumerate(spec.lambda_fields):
        low = lam.values[in_ball].min()
        if low < ball.lambda_lower:
            raise SpecValidationError(
                f"lambda_{l} dips to {low} inside B_{{2 rho}}(q); "
                f"declared lower bound is {ball.lambda_lower}"
            )
    if spec.lambda_upper < ball.lambda_lower:
        raise SpecValidationError("Lambda_upper < Lambda_lower is inconsistent")
    if spec.lambda_upper <= 0.0:
        raise SpecValidationError("all lambda_l vanish identically")
    return spec


def make_system(
    nonlinearities: Sequence[Nonlinearity],
    lambda_fields: Sequence[ScalarField],
    lower: LowerEnvelope,
    ball: PositivityBall,
    growth: GrowthEnvelope | None = None,
) -> SystemSpec:
    """Assemble and validate a :class:`SystemSpec`."""
    return validate_system(
        SystemSpec(
            nonlinearities=tuple(nonlinearities),
            lambda_fields=tuple(lambda_fields),
            lower=lower,
            ball=ball,
            growth=growth,
        )
    )


@dataclass(frozen=True)
class SystemTemplate:
    """Grid-independent system description (lambdas as callables/constants);
    instantiate on each truncation or on the configured domain."""

    nonlinearities: tuple[Nonlinearity, ...]
    lambda_fns: tuple[Callable | float, ...]
    lower: LowerEnvelope
    ball: PositivityBall
    growth: GrowthEnvelope | None = None

    def instantiate(self, grid: Grid) -> SystemSpec:
        fields = []
        for fn in self.lambda_fns:
            if callable(fn):
                fields.append(ScalarField.from_function(grid, fn))
            else:
                fields.append(ScalarField.constant(grid, float(fn)))
        return make_system(self.nonlinearities, fields, self.lower, self.ball, self.growth)


def evaluate_f(spec: SystemSpec, l: int, z: Sequence) -> float:
    """Evaluate f_l at one point z (length n+1). Pure and deterministic."""
    if not 0 <= l < spec.n_plus_1:
        raise SpecValidationError(f"component index {l} out of range 0..{spec.n_plus_1 - 1}")
    zz = [float(v) for v in z]
    if len(zz) != spec.n_plus_1:
        raise SpecValidationError(f"expected {spec.n_plus_1} arguments, got {len(zz)}")
    if not all(np.isfinite(zz)):
        raise SpecValidationError("non-finite input to f_l")
    val = float(spec.nonlinearities[l].evaluate(zz))
    if not np.isfinite(val):
        raise SpecValidationError(f"f_{l}{tuple(zz)} is non-finite")
    return val


def evaluate_f_fields(
    spec: SystemSpec, l: int, arrays: Sequence[NDArray[np.float64]]
) -> NDArray[np.float64]:
    """Nodal evaluation of f_l over n+1 aligned value arrays."""
    out = np.asarray(spec.nonlinearities[l].evaluate(list(arrays)), dtype=float)
    if not np.isfinite(out).all():
        raise SpecValidationError(f"f_{l} produced non-finite nodal values")
    return out


# ---------------------------------------------------------------------------
# sampling-based condition checks
# ---------------------------------------------------------------------------

@dataclass
class ConditionReport:
    """Outcome of one sampled condition check (report-only)."""

    condition: str
    passed: bool
    max_violation: float
    checked: int
    worst_point: list | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "passed": self.passed,
            "max_violation": self.max_violation,
            "checked": self.checked,
            "worst_point": self.worst_point,
            "note": self.note,
        }


def _evaluate_rows(spec: SystemSpec, l: int, z: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.asarray(spec.nonlinearities[l].evaluate([z[:, j] for j in range(z.shape[1])]))


def verify_growth(
    spec: SystemSpec,
    sample_count: int = 4096,
    box_radius: float = 10.0,
    seed: int = 0,
) -> ConditionReport:
    """Sample condition (a): |f_l(z)| within the declared envelope on the
    box [-r, r]^{n+1} plus axis-aligned rays.  PASS iff zero violations."""
    if sample_count < 1000:
        raise SpecValidationError("growth check needs sample_count >= 1000")
    if spec.growth is None:
        raise SpecValidationError("no growth envelope declared (condition (a') path?)")
    rng = np.random.default_rng(seed)
    n1 = spec.n_plus_1
    z = rng.uniform(-box_radius, box_radius, size=(sample_count, n1))
    rays = []
    ts = np.linspace(0.0, box_radius, 65)[1:]
    for j in range(n1):
        for sign in (1.0, -1.0):
            block = np.zeros((ts.size, n1))
            block[:, j] = sign * ts
            rays.append(block)
    z = np.vstack([z] + rays)
    worst = -np.inf
    worst_point = None
    for l in range(n1):
        viol = np.abs(_evaluate_rows(spec, l, z)) - spec.growth.bound(l, z)
        k = int(np.argmax(viol))
        if viol[k] > worst:
            worst = float(viol[k])
            worst_point = [l] + [float(v) for v in z[k]]
    return ConditionReport(
        condition="(a) sublinear growth",
        passed=worst <= 0.0,
        max_violation=max(worst, 0.0),
        checked=z.shape[0] * n1,
        worst_point=worst_point,
    )


def verify_lower_envelope(
    spec: SystemSpec, sample_count: int = 4096, seed: int = 0
) -> ConditionReport:
    """Sample condition (b) on [0, epsilon0)^{n+1}; tolerance 1e-12 absolute."""
    rng = np.random.default_rng(seed)
    n1 = spec.n_plus_1
    eps0 = spec.lower.epsilon0
    z = rng.uniform(0.0, eps0, size=(sample_count, n1)) * (1.0 - 1e-12)
    extra = [np.zeros((1, n1)), np.full((1, n1), eps0 * (1.0 - 1e-9))]
    for j in range(n1):
        block = np.zeros((16, n1))
        block[:, j] = np.linspace(0.0, eps0 * (1.0 - 1e-9), 16)
        extra.append(block)
    z = np.vstack([z] + extra)
    worst = -np.inf
    worst_point = None
    for l in range(n1):
        viol = spec.lower.value(l, z) - _evaluate_rows(spec, l, z)
        k = int(np.argmax(viol))
        if viol[k] > worst:
            worst = float(viol[k])
            worst_point = [l] + [float(v) for v in z[k]]
    return ConditionReport(
        condition="(b) lower envelope",
        passed=worst <= 1e-12,
        max_violation=max(worst, 0.0),
        checked=z.shape[0] * n1,
        worst_point=worst_point,
    )


def verify_cooperative(
    spec: SystemSpec,
    pair_count: int = 4096,
    box_radius: float = 10.0,
    seed: int = 0,
) -> ConditionReport:
    """Sample condition (c): y <= z componentwise implies f_l(y) <= f_l(z),
    on the nonnegative orthant (iterates are provably nonnegative)."""
    rng = np.random.default_rng(seed)
    n1 = spec.n_plus_1
    z = rng.uniform(0.0, box_radius, size=(pair_count, n1))
    y = z * rng.uniform(0.0, 1.0, size=(pair_count, n1))
    worst = -np.inf
    worst_point = None
    for l in range(n1):
        viol = _evaluate_rows(spec, l, y) - _evaluate_rows(spec, l, z)
        k = int(np.argmax(viol))
        if viol[k] > worst:
            worst = float(viol[k])
            worst_point = [l] + [float(v) for v in y[k]] + [float(v) for v in z[k]]
    return ConditionReport(
        condition="(c) cooperative",
        passed=worst <= 1e-12,
        max_violation=max(worst, 0.0),
        checked=pair_count * n1,
        worst_point=worst_point,
    )


def verify_continuity_from_below(
    spec: SystemSpec,
    sequence_count: int = 256,
    target_radius: float = 2.0,
    seed: int = 0,
) -> ConditionReport:
    """Sample condition (d): along nondecreasing sequences z_k -> z, f_l(z_k)
    approaches f_l(z) within 1e-8 once ||z - z_k|| <= 1e-10.

    Targets sample [0, target_radius] plus every declared jump threshold
    (where right-continuous steps fail and left-continuous ones pass).  The
    absolute 1e-8 tolerance at a float-resolvable gap presumes moderate
    local slopes, so the target range is kept at the scale the iterates
    actually visit rather than the growth-check box.
    """
    rng = np.random.default_rng(seed)
    n1 = spec.n_plus_1
    targets = [rng.uniform(0.0, target_radius, size=(sequence_count, n1)), np.zeros((1, n1))]
    for nl in spec.nonlinearities:
        for j, theta in nl.jump_thresholds:
            block = rng.uniform(0.0, target_radius, size=(8, n1))
            block[:, j] = theta
            targets.append(block)
    z = np.vstack(targets)
    start_gap = z * rng.uniform(0.1, 1.0, size=z.shape)
    # Geometric approach from below, halved until the gap is far below 1e-10
    # but still resolvable in float64 (threshold targets stay strictly below).
    biggest = max(target_radius, float(z.max()), 1.0)
    halvings = max(40, int(np.ceil(np.log2(biggest / 1e-11))))
    z_near = z - start_gap * 0.5**halvings
    worst = -np.inf
    worst_point = None
    for l in range(n1):
        diff = np.abs(_evaluate_rows(spec, l, z_near) - _evaluate_rows(spec, l, z))
        k = int(np.argmax(diff))
        if diff[k] > worst:
            worst = float(diff[k])
            worst_point = [l] + [float(v) for v in z[k]]
    return ConditionReport(
        condition="(d) continuity from below",
        passed=worst <= 1e-8,
        max_violation=float(worst),
        checked=z.shape[0] * n1,
        worst_point=worst_point,
    )


# kept for callers that want all four at once (the CLI report does)
def verify_all(spec: SystemSpec, seed: int = 0, **kwargs) -> dict[str, ConditionReport | None]:
    growth = None
    if spec.growth is not None:
        growth = verify_growth(spec, seed=seed, **kwargs.get("growth", {}))
    return {
        "growth": growth,
        "lower_envelope": verify_lower_envelope(spec, seed=seed),
        "cooperative": verify_cooperative(spec, seed=seed),
        "continuity_from_below": verify_continuity_from_below(spec, seed=seed),
    }
