import math

import numpy as np
import pytest

from monotone_elliptic import (
    LowerEnvelope,
    SubsolutionError,
    build_rectangle,
    build_subsolution,
    bump_laplacian,
    bump_value,
    chain_violations,
    choose_eta,
    estimate_C,
    neg_laplacian_values,
)
from helpers import lane_emden_system

# frozen regression value for R=1, dim=2, s=1/2 (10^4-point radial sample,
# 1.1x headroom); the densified sample below must stay within 1% of it
C_REFERENCE = 6.734666199920765


# ---------------------------------------------------------------------------
# bump function
# ---------------------------------------------------------------------------

def test_bump_values():
    assert bump_value((0.0, 0.0), (0.0, 0.0), 1.0) == pytest.approx(math.exp(-1.0), rel=1e-12)
    assert bump_value((1.0, 0.0), (0.0, 0.0), 1.0) == 0.0
    assert bump_value((2.0, 0.0), (0.0, 0.0), 1.0) == 0.0
    assert bump_value((0.5, 0.0), (0.0, 0.0), 1.0) == pytest.approx(
        math.exp(-4.0 / 3.0), rel=1e-12
    )


def test_bump_laplacian_at_center():
    assert bump_laplacian((0.0, 0.0), (0.0, 0.0), 1.0, dim=2) == pytest.approx(
        -4.0 * math.exp(-1.0), rel=1e-12
    )
    assert bump_laplacian((0.0,), (0.0,), 1.0, dim=1) == pytest.approx(
        -2.0 * math.exp(-1.0), rel=1e-12
    )


def _fd_laplacian(point, center, R, dim, step=1e-5):
    total = 0.0
    point = np.asarray(point, dtype=float)
    for axis in range(dim):
        e = np.zeros(dim)
        e[axis] = step
        total += (
            bump_value(point + e, center, R)
            - 2.0 * bump_value(point, center, R)
            + bump_value(point - e, center, R)
        ) / step**2
    return total


@pytest.mark.parametrize("dim", [1, 2])
def test_bump_laplacian_matches_finite_differences(dim):
    # sign convention oracle: central differences at random interior points
    rng = np.random.default_rng(7)
    center = np.zeros(dim)
    R = 1.0
    for _ in range(20):
        direction = rng.normal(size=dim)
        direction /= np.linalg.norm(direction)
        point = direction * rng.uniform(0.0, 0.85) * R
        closed = bump_laplacian(point, center, R, dim)
        fd = _fd_laplacian(point, center, R, dim)
        assert closed == pytest.approx(fd, rel=1e-5, abs=1e-9)


def test_bump_laplacian_vanishes_at_edge():
    # decays faster than any power of R^2 - r^2
    vals = [abs(bump_laplacian((r, 0.0), (0.0, 0.0), 1.0, dim=2)) for r in (0.9, 0.99, 0.9999)]
    assert vals[0] > vals[1] > vals[2]
    assert bump_laplacian((1.0 - 1e-9, 0.0), (0.0, 0.0), 1.0, dim=2) == 0.0
    assert bump_laplacian((1.5, 0.0), (0.0, 0.0), 1.0, dim=2) == 0.0


# ---------------------------------------------------------------------------
# the ratio constant
# ---------------------------------------------------------------------------

def test_estimate_C_regression():
    assert estimate_C(1.0, 2, 0.5) == pytest.approx(C_REFERENCE, rel=1e-12)


def test_estimate_C_sample_density_self_consistency():
    coarse = estimate_C(1.0, 2, 0.5, sample_count=10_000)
    dense = estimate_C(1.0, 2, 0.5, sample_count=20_000)
    assert abs(dense - coarse) <= 0.01 * coarse


def test_estimate_C_dominates_ratio_everywhere():
    R, s = 1.0, 0.5
    C = estimate_C(R, 2, s)
    r = np.linspace(0.0, R, 200_001)[:-1]
    # dense independent evaluation of -lap(phi)/phi^s via the scalar forms
    vals = np.array([bump_laplacian((ri, 0.0), (0.0, 0.0), R, 2) for ri in r[:: 1000]])
    phis = np.array([bump_value((ri, 0.0), (0.0, 0.0), R) for ri in r[:: 1000]])
    keep = phis > 0
    assert (np.maximum(0.0, -vals[keep]) <= C * phis[keep] ** s).all()


def test_estimate_C_exponent_scaling():
    # for s' > s the ratio grows at least by 1/phi_max^{s'-s} on the same sample
    c_low = estimate_C(1.0, 2, 0.5)
    c_high = estimate_C(1.0, 2, 0.7)
    assert c_high >= c_low * math.exp(-1.0) ** -0.2 * (1.0 - 1e-12)


def test_estimate_C_validates_inputs():
    with pytest.raises(SubsolutionError):
        estimate_C(1.0, 2, 1.0)
    with pytest.raises(SubsolutionError):
        estimate_C(-1.0, 2, 0.5)


# ---------------------------------------------------------------------------
# eta
# ---------------------------------------------------------------------------

def test_choose_eta_forced_by_ratio_constraint():
    eta = choose_eta(
        C=2.0, lambda_lower=1.0, A_min=1.0, s=0.5, delta=1.0, epsilon0=1.0,
        phi_max=math.exp(-1.0),
    )
    assert eta == pytest.approx(0.225, rel=1e-12)


def test_choose_eta_capped_below_one():
    eta = choose_eta(
        C=1.0, lambda_lower=1.0, A_min=1.0, s=0.5, delta=100.0, epsilon0=100.0,
        phi_max=math.exp(-1.0),
    )
    assert eta == pytest.approx(0.9)
    assert eta < 1.0


def test_choose_eta_capped_by_delta():
    eta = choose_eta(
        C=1e-6, lambda_lower=1.0, A_min=1.0, s=0.5, delta=1e-3, epsilon0=1.0,
        phi_max=math.exp(-1.0),
    )
    assert eta == pytest.approx(0.5e-3 * math.e, rel=1e-12)


@pytest.mark.parametrize("s", [0.1, 0.5, 0.7, 0.9, 0.99])
def test_choose_eta_always_keeps_five_percent_margin(s):
    for C in (0.5, 1.0, 7.3):
        eta = choose_eta(C, 1.0, 1.0, s, 1.0, 1.0, math.exp(-1.0))
        assert C * eta ** (1.0 - s) <= 0.95 * 1.0 * 1.0 + 1e-12


def test_choose_eta_validates():
    with pytest.raises(SubsolutionError):
        choose_eta(0.0, 1.0, 1.0, 0.5, 1.0, 1.0, 0.3)
    with pytest.raises(SubsolutionError):
        choose_eta(1.0, 1.0, 1.0, 1.5, 1.0, 1.0, 0.3)


# ---------------------------------------------------------------------------
# certificate construction
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def square_setup():
    grid = build_rectangle((0.0, 1.0), (0.0, 1.0), 1 / 32)
    spec = lane_emden_system(grid)
    return grid, spec


def test_certificate_on_lane_emden_square(square_setup):
    grid, spec = square_setup
    cert = build_subsolution(grid, spec, delta=1.0)
    assert cert.max_violation <= 1e-10
    assert 0.0 < cert.sup_h < 1.0
    assert cert.radius == pytest.approx(0.2)  # min(rho, 0.9 * dist to boundary)
    assert cert.s == 0.5
    h = cert.field.values
    assert h.min() >= 0.0
    assert h[16, 16] > 0.0  # positive at the ball centre
    assert (h[~grid.interior_mask] == 0.0).all()
    # nodal chain: each inequality link holds to 1e-10
    links = chain_violations(grid, spec, cert)
    assert all(v <= 1e-10 for v in links.values())
    # the discrete inequality itself, re-derived independently
    lap = neg_laplacian_values(grid, h)
    rhs = spec.lambda_fields[0].values * np.sqrt(h)
    mask = grid.interior_mask
    assert (lap[mask] - rhs[mask]).max() <= 1e-10


def test_certificate_eta_margin(square_setup):
    grid, spec = square_setup
    cert = build_subsolution(grid, spec, delta=1.0)
    lam_a = spec.ball.lambda_lower * spec.lower.A_min
    assert cert.c_const * cert.eta ** (1.0 - cert.s) <= 0.95 * lam_a


def test_certificate_respects_small_delta(square_setup):
    grid, spec = square_setup
    cert = build_subsolution(grid, spec, delta=1e-6)
    assert 0.0 < cert.sup_h < 1e-6
    assert cert.max_violation <= 1e-10


def test_all_zero_lower_envelope_rejected():
    # degenerate condition (b) data never reaches the builder
    with pytest.raises(Exception, match="at least one A"):
        LowerEnvelope(A=[[0.0, 0.0], [0.0, 0.0]], alpha=[[0.5] * 2] * 2)


def test_bump_radius_must_clear_spacing():
    grid = build_rectangle((0.0, 1.0), (0.0, 1.0), 0.25)
    spec = lane_emden_system(grid, rho=0.2)
    with pytest.raises(SubsolutionError, match="spacing"):
        build_subsolution(grid, spec, delta=1.0)


def test_delta_must_be_positive(square_setup):
    grid, spec = square_setup
    with pytest.raises(SubsolutionError, match="delta"):
        build_subsolution(grid, spec, delta=0.0)
