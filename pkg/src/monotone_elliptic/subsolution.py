"""Explicit subsolution construction from a compactly supported bump.

The starting point of the monotone iteration is h = eta * phi, where phi is
the standard bump ``exp(-1/(R^2 - |x - q|^2))`` on a ball B_R(q) placed
inside the region where every lambda_l >= Lambda_lower.  The scale eta is
chosen so that

    -lap(h) <= C eta phi^s = C eta^{1-s} h^s <= Lambda A h^s
            <= Lambda sum_j A_{l,j} h^{alpha_{l,j}} <= lambda_l f_l(h, ..., h)

holds with margin, where C bounds -lap(phi)/phi^s, s >= every alpha_{l,j},
A is the smallest nonzero lower-envelope constant, and the last step is the
lower envelope (which needs ||h|| < epsilon0, hence the epsilon0 cap).

The certificate is discrete-exact: the whole chain is re-verified on the
grid with the 5-point Laplacian before the iteration is allowed to start.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from .errors import SubsolutionError
from .grids import Grid, ScalarField
from .poisson import neg_laplacian_values
from .systems import SystemSpec, evaluate_f_fields

# Nodal slack for the discrete subsolution inequality.
NODAL_TOLERANCE = 1e-10


def bump_value(x: Sequence[float] | float, q: Sequence[float] | float, R: float) -> float:
    """exp(-1/(R^2 - |x-q|^2)) inside the ball B_R(q), 0 outside."""
    if R <= 0.0:
        raise SubsolutionError(f"bump radius must be positive, got {R}")
    dx = np.atleast_1d(np.asarray(x, dtype=float) - np.asarray(q, dtype=float))
    r2 = float((dx * dx).sum())
    if r2 >= R * R:
        return 0.0
    return math.exp(-1.0 / (R * R - r2))


def bump_laplacian(
    x: Sequence[float] | float, q: Sequence[float] | float, R: float, dim: int
) -> float:
    """Laplacian of the bump from its closed radial form.

    With g(r) = 1/(R^2 - r^2):  lap(phi) = phi * (g'^2 - g'' - (dim-1) g'/r),
    using the removable-singularity limit g'/r -> 2/R^4 at r = 0.  The sign
    convention is validated against central finite differences in the test
    suite (lap(phi) < 0 at the peak).
    """
    dx = np.atleast_1d(np.asarray(x, dtype=float) - np.asarray(q, dtype=float))
    r2 = float((dx * dx).sum())
    if r2 >= R * R:
        return 0.0
    w = R * R - r2
    r = math.sqrt(r2)
    g1 = 2.0 * r / w**2
    g2 = 2.0 / w**2 + 8.0 * r2 / w**3
    g1_over_r = 2.0 / w**2 if r == 0.0 else g1 / r
    phi = math.exp(-1.0 / w)
    return phi * (g1 * g1 - g2 - (dim - 1) * g1_over_r)


def _radial_ratio(r: NDArray[np.float64], R: float, dim: int, s: float) -> NDArray[np.float64]:
    """max(0, -lap(phi)) / phi^s evaluated stably as phi^{1-s} * bracket."""
    w = R * R - r * r
    g1 = 2.0 * r / w**2
    g2 = 2.0 / w**2 + 8.0 * r * r / w**3
    g1_over_r = np.where(r > 0.0, g1 / np.where(r > 0.0, r, 1.0), 2.0 / w**2)
    neg_bracket = g2 + (dim - 1) * g1_over_r - g1 * g1
    return np.exp(-(1.0 - s) / w) * np.maximum(0.0, neg_bracket)


def estimate_C(R: float, dim: int, s: float, sample_count: int = 10_000) -> float:
    """Constant C with -lap(phi) <= C phi^s, from a dense radial sample
    with 10% headroom.  Finite because phi^{1-s} beats any power of
    1/(R^2 - r^2) near the ball edge."""
    if not 0.0 < s < 1.0:
        raise SubsolutionError(f"exponent s must be in (0, 1), got {s}")
    if R <= 0.0:
        raise SubsolutionError(f"radius must be positive, got {R}")
    r = np.linspace(0.0, R, sample_count + 1)[:-1]
    vals = _radial_ratio(r, R, dim, s)
    if not np.isfinite(vals).all():
        raise SubsolutionError("non-finite value in the radial C sample (implementation bug)")
    return 1.1 * float(vals.max())


def choose_eta(
    C: float,
    lambda_lower: float,
    A_min: float,
    s: float,
    delta: float,
    epsilon0: float,
    phi_max: float,
) -> float:
    """Bump scale eta: keeps C eta^{1-s} below Lambda*A with margin and
    ||h|| = eta*phi_max below half of min(delta, 1, epsilon0)."""
    for name, v in (
        ("C", C), ("lambda_lower", lambda_lower), ("A_min", A_min),
        ("delta", delta), ("epsilon0", epsilon0), ("phi_max", phi_max),
    ):
        if not v > 0.0:
            raise SubsolutionError(f"choose_eta needs positive {name}, got {v}")
    if not 0.0 < s < 1.0:
        raise SubsolutionError(f"exponent s must be in (0, 1), got {s}")
    la = lambda_lower * A_min
    eta = min(
        0.9 * (la / C) ** (1.0 / (1.0 - s)),
        0.5 * min(delta, 1.0, epsilon0) / phi_max,
        0.9,
        # binds only for s near 1, where the 0.9 prefactor alone would not
        # keep C eta^{1-s} <= 0.95 * Lambda * A
        (0.95 * la / C) ** (1.0 / (1.0 - s)),
    )
    return eta


@dataclass(frozen=True)
class SubsolutionCertificate:
    """A verified discrete subsolution h = eta * phi.

    ``max_violation`` is the largest nodal excess of -lap_h(h) over
    lambda_l f_l(h, ..., h) across all components (0 for a clean pass).
    """

    center: tuple[float, float]
    radius: float
    s: float
    c_const: float
    eta: float
    delta: float
    field: ScalarField
    max_violation: float

    @property
    def sup_h(self) -> float:
        return self.field.sup_norm

    def summary(self) -> dict:
        return {
            "center": list(self.center),
            "R": self.radius,
            "s": self.s,
            "C": self.c_const,
            "eta": self.eta,
            "delta": self.delta,
            "sup_h": self.sup_h,
            "max_violation": self.max_violation,
        }


def _bump_field(grid: Grid, q: Sequence[float], R: float) -> NDArray[np.float64]:
    X, Y = grid.node_coords()
    r2 = (X - q[0]) ** 2 + (Y - q[1]) ** 2
    inside = r2 < R * R
    out = np.zeros(grid.dims)
    out[inside] = np.exp(-1.0 / (R * R - r2[inside]))
    return out


def _subsolution_violation(grid: Grid, spec: SystemSpec, h: NDArray[np.float64]) -> float:
    """Largest nodal excess of -lap_h(h) over lambda_l * f_l(h,...,h)."""
    lap = neg_laplacian_values(grid, h)
    mask = grid.interior_mask
    args = [h] * spec.n_plus_1
    worst = -np.inf
    for l in range(spec.n_plus_1):
        rhs = spec.lambda_fields[l].values * evaluate_f_fields(spec, l, args)
        worst = max(worst, float((lap[mask] - rhs[mask]).max()))
    return worst


def build_subsolution(grid: Grid, spec: SystemSpec, delta: float) -> SubsolutionCertificate:
    """Construct and verify a subsolution with 0 < ||h|| < min(delta, 1, eps0).

    The bump radius is min(rho, 0.9 * distance(q, boundary)) so the closed
    ball sits where lambda_l >= Lambda_lower.  If discretization error near
    the bump edge breaks the nodal inequality, eta is halved and the check
    rerun (the right-hand side shrinks slower since every alpha < 1).
    """
    if not delta > 0.0:
        raise SubsolutionError(f"delta must be positive, got {delta}")
    ball = spec.ball
    q = ball.center
    R = min(ball.rho, 0.9 * grid.distance_to_boundary(q))
    if R <= grid.spacing:
        raise SubsolutionError(
            f"bump radius {R:.3g} does not clear the grid spacing {grid.spacing}; "
            "refine the grid or enlarge the positivity ball"
        )
    s = spec.lower.max_alpha
    phi = _bump_field(grid, q, R)
    if not (phi > 0.0).any():
        raise SubsolutionError("no grid node inside the bump support")

    c_radial = estimate_C(R, grid.ndim, s)
    # Clamp with the discrete ratio so the first chain link holds nodally:
    # both sides of -lap_h(h) <= C eta phi^s scale linearly in eta, so
    # halving eta can never repair this particular link.
    lap_phi = neg_laplacian_values(grid, phi)
    pos = grid.interior_mask & (phi > 0.0)
    ratio_disc = float(np.max(np.maximum(0.0, lap_phi[pos]) / phi[pos] ** s))
    C = max(c_radial, 1.1 * ratio_disc)

    phi_max_analytic = math.exp(-1.0 / (R * R))
    eta = choose_eta(
        C, ball.lambda_lower, spec.lower.A_min, s, delta, spec.lower.epsilon0, phi_max_analytic
    )

    for _ in range(41):
        h = eta * phi
        violation = _subsolution_violation(grid, spec, h)
        if violation <= NODAL_TOLERANCE:
            cert = SubsolutionCertificate(
                center=(q[0], q[1]),
                radius=R,
                s=s,
                c_const=C,
                eta=eta,
                delta=delta,
                field=ScalarField(grid, h),
                max_violation=max(violation, 0.0),
            )
            if not 0.0 < cert.sup_h < min(delta, 1.0, spec.lower.epsilon0):
                raise SubsolutionError(
                    f"||h|| = {cert.sup_h:.3e} escaped (0, min(delta, 1, epsilon0))"
                )
            return cert
        eta *= 0.5
    raise SubsolutionError(
        "discrete subsolution inequality still fails after 40 halvings of eta; "
        "the declared lower-envelope constants are likely inconsistent with f_l"
    )


def chain_violations(grid: Grid, spec: SystemSpec, cert: SubsolutionCertificate) -> dict[str, float]:
    """Max nodal violation of each inequality link, over nodes where h > 0.

    Keys in chain order; all values should be <= 1e-10 for a valid
    certificate (they are 0 up to rounding by construction).
    """
    h = cert.field.values
    phi = _bump_field(grid, cert.center, cert.radius)
    mask = grid.interior_mask & (phi > 0.0)
    lam = spec.ball.lambda_lower
    A = spec.lower.A_min
    s = cert.s
    lap = neg_laplacian_values(grid, h)[mask]
    c_eta_phis = cert.c_const * cert.eta * phi[mask] ** s
    lam_a_hs = lam * A * h[mask] ** s
    links = {
        "neg_lap_le_C_eta_phi_s": float((lap - c_eta_phis).max()),
        "C_eta_phi_s_le_LambdaA_h_s": float((c_eta_phis - lam_a_hs).max()),
    }
    worst_env = -np.inf
    worst_rhs = -np.inf
    args = [h] * spec.n_plus_1
    for l in range(spec.n_plus_1):
        envelope = np.zeros(int(mask.sum()))
        for j in range(spec.n_plus_1):
            if spec.lower.A[l, j] > 0.0:
                envelope += spec.lower.A[l, j] * h[mask] ** spec.lower.alpha[l, j]
        env_scaled = lam * envelope
        worst_env = max(worst_env, float((lam_a_hs - env_scaled).max()))
        rhs = spec.lambda_fields[l].values[mask] * evaluate_f_fields(spec, l, args)[mask]
        worst_rhs = max(worst_rhs, float((env_scaled - rhs).max()))
    links["LambdaA_h_s_le_Lambda_envelope"] = worst_env
    links["Lambda_envelope_le_lambda_f"] = worst_rhs
    return links
