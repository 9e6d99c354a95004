"""Lamperti change of variables for the bounded Pearson diffusion.

Y = 2 arcsin(sqrt(Psi/eta)) maps [0, eta] onto [0, pi] and turns the
state-dependent noise into additive noise:

    dY_t = f(Y_t) dt + sigma dW_t,
    f(y) = a1 cot(y/2) - a2 tan(y/2),
    a1 = (4 alpha gamma - sigma^2 eta) / (4 eta),
    a2 = (4 alpha (eta - gamma) - sigma^2 eta) / (4 eta).

f is strictly decreasing on (0, pi) with a unique zero y* and satisfies
f'(y) <= -C0 with C0 = (2 alpha - sigma^2)/4, the one-sided Lipschitz
constant every scheme below relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainViolation
from .pearson import PearsonParams


@dataclass(frozen=True)
class LampertiDrift:
    a1: float
    a2: float
    c0_const: float
    y_star: float


def forward(psi, eta: float):
    """y = 2 arcsin(sqrt(psi/eta)), monotone from [0, eta] onto [0, pi]."""
    psi = np.asarray(psi, dtype=float)
    if np.any(psi < 0.0) or np.any(psi > eta):
        raise DomainViolation(f"psi must lie in [0, eta]=[0, {eta}]")
    out = 2.0 * np.arcsin(np.sqrt(psi / eta))
    return out if out.ndim else float(out)


def inverse(y, eta: float):
    """psi = eta sin^2(y/2); accepts any real y, lands in [0, eta]."""
    y = np.asarray(y, dtype=float)
    out = eta * np.sin(0.5 * y) ** 2
    return out if out.ndim else float(out)


def coefficients(params: PearsonParams) -> LampertiDrift:
    """Drift constants a1, a2, the decay bound C0 and the zero y*.

    sigma = 0 is accepted (the coefficients stay meaningful for the ODE
    limit); validated stochastic params always give a1, a2 > 0.
    y* = 2 arctan(sqrt(a1/a2)) in closed form, polished by one Newton
    step on f to guard rounding when a1/a2 is extreme.
    """
    alpha, gamma, sigma, eta = params.alpha, params.gamma, params.sigma, params.eta
    a1 = (4.0 * alpha * gamma - sigma**2 * eta) / (4.0 * eta)
    a2 = (4.0 * alpha * (eta - gamma) - sigma**2 * eta) / (4.0 * eta)
    c0 = (2.0 * alpha - sigma**2) / 4.0
    y_star = 2.0 * math.atan(math.sqrt(a1 / a2))
    half = 0.5 * y_star
    fy = a1 * math.cos(half) / math.sin(half) - a2 * math.sin(half) / math.cos(half)
    fpy = -a1 / (2.0 * math.sin(half) ** 2) - a2 / (2.0 * math.cos(half) ** 2)
    y_star -= fy / fpy
    return LampertiDrift(a1=a1, a2=a2, c0_const=c0, y_star=y_star)


def drift(d: LampertiDrift, y):
    """f(y) on (0, pi), written with half-angle sin/cos to keep signs
    and overflow behavior explicit near the endpoints."""
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0.0) or np.any(y >= math.pi):
        raise DomainViolation("drift is defined on the open interval (0, pi)")
    half = 0.5 * y
    s, c = np.sin(half), np.cos(half)
    out = d.a1 * c / s - d.a2 * s / c
    return out if out.ndim else float(out)


def drift_derivative(d: LampertiDrift, y):
    """f'(y) = -a1/(2 sin^2(y/2)) - a2/(2 cos^2(y/2)) <= -C0 on (0, pi)."""
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0.0) or np.any(y >= math.pi):
        raise DomainViolation("drift derivative is defined on the open interval (0, pi)")
    half = 0.5 * y
    out = -d.a1 / (2.0 * np.sin(half) ** 2) - d.a2 / (2.0 * np.cos(half) ** 2)
    return out if out.ndim else float(out)
