"""Shared builders for test systems."""

import numpy as np

from monotone_elliptic import (
    GrowthEnvelope,
    LowerEnvelope,
    PositivityBall,
    PowerProduct,
    ScalarField,
    SystemTemplate,
    make_system,
)

INF = np.inf


def lane_emden_template(p=0.5, lam=1.0, center=(0.5, 0.5), rho=0.2, declare_growth=True):
    """Two-component cyclic system f_0 = u_1^p, f_1 = u_0^p."""
    growth = None
    if declare_growth:
        growth = GrowthEnvelope(
            C=[[INF, 1.0], [1.0, INF]], p=[[p, p], [p, p]], A=0.0
        )
    return SystemTemplate(
        nonlinearities=(PowerProduct(target=1, exponent=p), PowerProduct(target=0, exponent=p)),
        lambda_fns=(lam, lam),
        lower=LowerEnvelope(A=[[0.0, 1.0], [1.0, 0.0]], alpha=[[p, p], [p, p]], epsilon0=1.0),
        ball=PositivityBall(center=center, rho=rho, lambda_lower=lam if not callable(lam) else 1.0),
        growth=growth,
    )


def lane_emden_system(grid, p=0.5, lam=1.0, center=(0.5, 0.5), rho=0.2, declare_growth=True):
    return lane_emden_template(p, lam, center, rho, declare_growth).instantiate(grid)


def sqrt_template(lam=1.0, center=(0.0, 0.0), rho=0.2, declare_growth=True):
    """Single decoupled equation f(u) = u^{1/2}."""
    growth = GrowthEnvelope(C=[[1.0]], p=[[0.5]], A=0.0) if declare_growth else None
    return SystemTemplate(
        nonlinearities=(PowerProduct(target=0, exponent=0.5),),
        lambda_fns=(lam,),
        lower=LowerEnvelope(A=[[1.0]], alpha=[[0.5]], epsilon0=1.0),
        ball=PositivityBall(center=center, rho=rho, lambda_lower=lam),
        growth=growth,
    )


def sqrt_system(grid, lam=1.0, center=(0.0, 0.0), rho=0.2, declare_growth=True):
    return sqrt_template(lam, center, rho, declare_growth).instantiate(grid)


def single_system(grid, nonlinearity, lam=1.0, center=(0.5, 0.5), rho=0.2,
                  lower=None, growth=None, lambda_lower=None):
    """Single-equation system around an arbitrary nonlinearity."""
    if lower is None:
        lower = LowerEnvelope(A=[[1.0]], alpha=[[0.5]], epsilon0=1.0)
    return make_system(
        nonlinearities=[nonlinearity],
        lambda_fields=[ScalarField.constant(grid, lam)],
        lower=lower,
        ball=PositivityBall(center=center, rho=rho,
                            lambda_lower=lam if lambda_lower is None else lambda_lower),
        growth=growth,
    )
