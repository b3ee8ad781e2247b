"""Standard and generalized Fisher information with the order-beta lower bounds.

For Hoelder-conjugate exponents 1/alpha + 1/beta = 1, the beta-th absolute
central moment of an unbiased estimate from M independent repetitions obeys

    Delta_beta >= M**(-beta/2) * f_alpha**(-beta/alpha),

where f_alpha = sum_theta p(theta|phi) * |d/dphi log p(theta|phi)|**alpha is
the alpha-th absolute moment of the score.  beta = alpha = 2 recovers the
familiar 1/(M*F) variance bound with F the Fisher information.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import NOON2, LikelihoodModel, ModelParams

# f_alpha summands are evaluated in the factored form |dp|^alpha * p^(1-alpha),
# which stays finite as p -> 0.  At v = 1 some outcome probabilities vanish on
# a measure-zero phase set; clamping the visibility just below 1 removes the
# 0/0 branch while perturbing f_alpha by O(clamp / min(1 + cos)) only.  1e-14
# keeps that perturbation below 1e-6 relative except within ~2e-5 rad of the
# singular phases.
VISIBILITY_CLAMP = 1e-14

CONJUGACY_TOL = 1e-12


def conjugate_exponent(beta: float) -> float:
    """Hoelder conjugate alpha = beta / (beta - 1); requires beta > 1."""
    if not (isinstance(beta, (int, float)) and math.isfinite(beta) and beta > 1.0):
        raise ValueError(f"moment order must be a finite real > 1, got {beta!r}")
    return beta / (beta - 1.0)


@dataclass(frozen=True)
class OrderPair:
    """A conjugate (beta, alpha) pair with 1/alpha + 1/beta = 1."""

    beta: float
    alpha: float

    def __post_init__(self) -> None:
        if self.beta <= 1.0 or self.alpha <= 1.0:
            raise ValueError("conjugate exponents must both exceed 1")
        if abs(1.0 / self.alpha + 1.0 / self.beta - 1.0) > CONJUGACY_TOL:
            raise ValueError(
                f"exponents ({self.beta}, {self.alpha}) are not Hoelder conjugate"
            )

    @classmethod
    def from_beta(cls, beta: float) -> "OrderPair":
        return cls(beta, conjugate_exponent(beta))


@dataclass(frozen=True)
class BoundValue:
    """Lower bound on Delta_beta from f_alpha and the number of shots."""

    beta: float
    alpha: float
    f_alpha: float
    bound_on_delta_beta: float
    shots: int

    def __post_init__(self) -> None:
        if self.f_alpha < 0.0:
            raise ValueError("generalized Fisher information cannot be negative")
        if self.shots < 1:
            raise ValueError("shots must be a positive integer")


def generalized_fisher(
    alpha: float,
    phase: float,
    params: ModelParams,
    model: LikelihoodModel = NOON2,
) -> float:
    """alpha-th absolute moment of the score, sum_x |dp|^alpha * p^(1-alpha).

    Outcomes with exactly zero probability contribute nothing (they never
    occur).  Any real alpha > 1 is accepted.
    """
    if not (isinstance(alpha, (int, float)) and math.isfinite(alpha) and alpha > 1.0):
        raise ValueError(f"information order must be a finite real > 1, got {alpha!r}")
    effective = ModelParams(min(params.visibility, 1.0 - VISIBILITY_CLAMP))
    total = 0.0
    for outcome in model.outcomes:
        p = model.prob(outcome, phase, effective)
        if p <= 0.0:
            continue
        dp = model.prob_gradient(outcome, phase, effective)
        total += abs(dp) ** alpha * p ** (1.0 - alpha)
    return total


def fisher(phase: float, params: ModelParams, model: LikelihoodModel = NOON2) -> float:
    """Fisher information F = f_2."""
    return generalized_fisher(2.0, phase, params, model)


def crb_bound(
    beta: float,
    phase: float,
    params: ModelParams,
    shots: int,
    model: LikelihoodModel = NOON2,
) -> BoundValue:
    """Order-beta lower bound on the absolute moment Delta_beta.

    Vanishing f_alpha signals unbounded uncertainty; the bound is then the
    +inf marker rather than an error.
    """
    if shots != int(shots) or shots < 1:
        raise ValueError(f"shots must be a positive integer, got {shots!r}")
    shots = int(shots)
    alpha = conjugate_exponent(beta)
    f_alpha = generalized_fisher(alpha, phase, params, model)
    if f_alpha == 0.0:
        bound = math.inf
    else:
        bound = shots ** (-beta / 2.0) * f_alpha ** (-beta / alpha)
    return BoundValue(
        beta=float(beta),
        alpha=alpha,
        f_alpha=f_alpha,
        bound_on_delta_beta=bound,
        shots=shots,
    )
