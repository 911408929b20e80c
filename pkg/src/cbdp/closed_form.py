"""Closed-form divergence values and analytic bounds.

Exact KL and Renyi divergences for shifted Laplace and Gaussian pairs, the
exact linear-adversary KL for the Laplace mechanism, analytic upper bounds
on the linear-adversary Renyi divergence for symmetric noise, and the
order-alpha conversion between alpha-divergence and Renyi divergence.

Every formula is implemented once in its d-dimensional general form; the
scalar case is d = 1 with a unit shift. Values are wrapped in
``BoundedValue`` so downstream consumers always know whether a number is
exact, an analytic upper bound, or a numerical lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

__all__ = [
    "BoundKind",
    "BoundedValue",
    "DivergenceSpec",
    "kl_laplace_exact",
    "kl_laplace_shift",
    "lin_kl_laplace_exact",
    "lin_kl_laplace_maximizer",
    "lin_kl_laplace_shift",
    "kl_gaussian_exact",
    "renyi_laplace_exact",
    "renyi_laplace_lower",
    "renyi_gaussian_exact",
    "lin_renyi_upper_symmetric",
    "lin_renyi_upper_laplace",
    "lin_renyi_upper_gaussian",
    "alpha_to_renyi",
    "renyi_to_alpha",
    "c_alpha",
    "dual_max",
    "laplace_crossover_alpha",
    "gaussian_crossover_alpha",
]


class BoundKind(str, Enum):
    EXACT = "exact"
    UPPER = "upper"
    LOWER = "lower"


@dataclass(frozen=True)
class BoundedValue:
    """A nonnegative divergence value tagged with its provenance."""

    value: float
    bound_kind: BoundKind

    def __post_init__(self):
        if not (self.value >= 0.0 or math.isinf(self.value)):
            raise ValueError(f"divergence values must be nonnegative, got {self.value}")


@dataclass(frozen=True)
class DivergenceSpec:
    """Which divergence: KL, alpha-divergence, Renyi of order alpha, or TV.

    Orders must be strictly greater than 1; the order-1 limit is KL.
    """

    kind: str
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in ("kl", "alpha", "renyi", "tv"):
            raise ValueError(f"unknown divergence kind {self.kind!r}")
        if self.kind in ("alpha", "renyi"):
            if self.alpha is None or not self.alpha > 1.0:
                raise ValueError(f"{self.kind} divergence needs order alpha > 1")
        elif self.alpha is not None:
            raise ValueError(f"{self.kind} divergence takes no order parameter")

    @staticmethod
    def kl() -> "DivergenceSpec":
        return DivergenceSpec("kl")

    @staticmethod
    def alpha_div(alpha: float) -> "DivergenceSpec":
        return DivergenceSpec("alpha", float(alpha))

    @staticmethod
    def renyi(alpha: float) -> "DivergenceSpec":
        return DivergenceSpec("renyi", float(alpha))

    @staticmethod
    def tv() -> "DivergenceSpec":
        return DivergenceSpec("tv")

    def describe(self) -> str:
        if self.alpha is None:
            return self.kind
        return f"{self.kind}({self.alpha:g})"


def _check_positive(name: str, value: float) -> float:
    value = float(value)
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


# ---------------------------------------------------------------------------
# KL divergence
# ---------------------------------------------------------------------------


def kl_laplace_exact(eps: float) -> BoundedValue:
    """KL divergence between Laplace(0, 1/eps) and Laplace(1, 1/eps).

    Equals eps - 1 + e^{-eps}.
    """
    eps = _check_positive("eps", eps)
    return BoundedValue(eps - 1.0 + math.exp(-eps), BoundKind.EXACT)


def kl_laplace_shift(eps: float, v: Sequence[float]) -> BoundedValue:
    """KL divergence between d-dimensional Laplace(0, 1/eps) products shifted by v.

    KL is additive over independent coordinates, and per coordinate the
    unit-shift formula applies at effective noise level eps*|v_i|.
    """
    eps = _check_positive("eps", eps)
    total = 0.0
    for vi in v:
        t = eps * abs(float(vi))
        if t > 0:
            total += t - 1.0 + math.exp(-t)
    return BoundedValue(total, BoundKind.EXACT)


def _lin_kl_unit(t: float) -> float:
    # value of the linear-adversary KL at effective noise level t = eps*|shift|
    if t == 0.0:
        return 0.0
    root = math.sqrt(1.0 + t * t)
    return root - 1.0 + math.log(1.0 - ((root - 1.0) / t) ** 2)


def lin_kl_laplace_exact(eps: float) -> BoundedValue:
    """Linear-adversary KL between Laplace(0, 1/eps) and Laplace(1, 1/eps).

    The dual maximization over h(x) = a*x + b has the stationary point
    a = 1 - sqrt(1 + eps^2) and value
    sqrt(1 + eps^2) - 1 + log(1 - (sqrt(1 + eps^2) - 1)^2 / eps^2),
    which is strictly below the unrestricted KL for every eps > 0.
    """
    eps = _check_positive("eps", eps)
    return BoundedValue(_lin_kl_unit(eps), BoundKind.EXACT)


def lin_kl_laplace_maximizer(eps: float) -> float:
    """The optimal linear coefficient a = 1 - sqrt(1 + eps^2)."""
    eps = _check_positive("eps", eps)
    return 1.0 - math.sqrt(1.0 + eps * eps)


def lin_kl_laplace_shift(eps: float, v: Sequence[float]) -> BoundedValue:
    """Linear-adversary KL for the d-dimensional shifted Laplace product.

    The linear dual objective separates across independent coordinates, so
    the value is the sum of per-coordinate unit-shift values at effective
    levels eps*|v_i|.
    """
    eps = _check_positive("eps", eps)
    return BoundedValue(
        sum(_lin_kl_unit(eps * abs(float(vi))) for vi in v), BoundKind.EXACT
    )


def kl_gaussian_exact(mu1: float, mu2: float, sigma: float) -> BoundedValue:
    """KL divergence between equal-variance Gaussians: (mu1 - mu2)^2 / (2 sigma^2).

    For equal variances the maximizing dual function is linear, so this is
    simultaneously the unrestricted KL and the linear-adversary KL.
    """
    sigma = _check_positive("sigma", sigma)
    return BoundedValue((float(mu1) - float(mu2)) ** 2 / (2.0 * sigma * sigma), BoundKind.EXACT)


# ---------------------------------------------------------------------------
# Renyi divergence
# ---------------------------------------------------------------------------


def _check_alpha(alpha: float, minimum: float = 1.0) -> float:
    alpha = float(alpha)
    if not alpha > minimum:
        raise ValueError(f"order alpha must be > {minimum}, got {alpha}")
    return alpha


def renyi_laplace_exact(alpha: float, eps: float, v: Sequence[float]) -> BoundedValue:
    """Exact Renyi divergence of order alpha between shifted Laplace products.

    Per coordinate with shift magnitude |v_i| and noise Laplace(., 1/eps):

        log( (1/2 + 1/(4a-2)) e^{|v_i|(a-1)eps} + (1/2 - 1/(4a-2)) e^{-|v_i| a eps} )

    summed over coordinates and divided by (alpha - 1).
    """
    alpha = _check_alpha(alpha)
    eps = _check_positive("eps", eps)
    c = 1.0 / (4.0 * alpha - 2.0)
    total = 0.0
    for vi in v:
        t = abs(float(vi)) * eps
        total += math.log((0.5 + c) * math.exp(t * (alpha - 1.0)) + (0.5 - c) * math.exp(-t * alpha))
    return BoundedValue(total / (alpha - 1.0), BoundKind.EXACT)


def renyi_laplace_lower(alpha: float, eps: float, v: Sequence[float]) -> BoundedValue:
    """Analytic lower bound eps*||v||_1 - d*log(2)/(alpha-1), clamped at 0."""
    alpha = _check_alpha(alpha)
    eps = _check_positive("eps", eps)
    v = np.asarray(list(v), dtype=float)
    value = eps * float(np.abs(v).sum()) - v.size * math.log(2.0) / (alpha - 1.0)
    return BoundedValue(max(value, 0.0), BoundKind.LOWER)


def renyi_gaussian_exact(alpha: float, sigma: float, v: Sequence[float]) -> BoundedValue:
    """Exact Renyi divergence alpha * ||v||_2^2 / (2 sigma^2) for shifted Gaussians."""
    alpha = _check_alpha(alpha)
    sigma = _check_positive("sigma", sigma)
    sq = float(np.dot(v, v))
    return BoundedValue(alpha * sq / (2.0 * sigma * sigma), BoundKind.EXACT)


def lin_renyi_upper_symmetric(alpha: float, v: Sequence[float], K: float, d: int) -> BoundedValue:
    """Upper bound on the linear-adversary Renyi divergence for symmetric noise.

    For a d-dimensional product of i.i.d. noise symmetric about 0 with
    E|Y|^{alpha/(alpha-1)} = K and shift vector v:

        (1/(alpha-1)) * log(1 + ||v||_alpha^alpha / (0.5^d K)^{alpha-1})

    Only proven for alpha > 2; smaller orders are rejected rather than
    reporting an unproven bound.
    """
    alpha = _check_alpha(alpha, minimum=2.0)
    K = _check_positive("K", K)
    if d < 1:
        raise ValueError("dimension d must be >= 1")
    norm_a = float(np.sum(np.abs(np.asarray(list(v), dtype=float)) ** alpha))
    value = math.log1p(norm_a / (0.5**d * K) ** (alpha - 1.0)) / (alpha - 1.0)
    return BoundedValue(value, BoundKind.UPPER)


def lin_renyi_upper_laplace(alpha: float, eps: float, v: Sequence[float]) -> BoundedValue:
    """Laplace specialization: (1/(a-1)) log(1 + 2^{d(a-1)} (eps ||v||_a)^a).

    Uses E|Y| = 1/eps as the worst-case moment of Laplace(0, 1/eps) over
    the exponent range (1, 2], valid for alpha > 2.
    """
    alpha = _check_alpha(alpha, minimum=2.0)
    eps = _check_positive("eps", eps)
    v = np.asarray(list(v), dtype=float)
    return lin_renyi_upper_symmetric(alpha, eps * np.abs(v), 1.0, v.size)


def lin_renyi_upper_gaussian(alpha: float, sigma: float, v: Sequence[float]) -> BoundedValue:
    """Gaussian specialization with worst-case moment sqrt(2/pi)*sigma^{a/(a-1)}.

    Reduces at d = 1, v = (1,) to (1/(a-1)) log(1 + sqrt(2 pi)^{a-1} / sigma^a).
    """
    alpha = _check_alpha(alpha, minimum=2.0)
    sigma = _check_positive("sigma", sigma)
    v = np.asarray(list(v), dtype=float)
    K = math.sqrt(2.0 / math.pi) * sigma ** (alpha / (alpha - 1.0))
    return lin_renyi_upper_symmetric(alpha, v, K, v.size)


# ---------------------------------------------------------------------------
# alpha-divergence <-> Renyi conversion and dual helpers
# ---------------------------------------------------------------------------


def alpha_to_renyi(alpha: float, d_alpha: float) -> float:
    """Renyi value log(1 + alpha(alpha-1) d_alpha) / (alpha - 1).

    Strictly increasing in d_alpha; ``renyi_to_alpha`` is its inverse.
    Tiny negative inputs from converged optimizers (within -1e-9) are
    tolerated and map to tiny negative outputs.
    """
    alpha = _check_alpha(alpha)
    d_alpha = float(d_alpha)
    if d_alpha < -1e-9:
        raise ValueError(f"alpha-divergence must be nonnegative, got {d_alpha}")
    return math.log1p(alpha * (alpha - 1.0) * d_alpha) / (alpha - 1.0)


def renyi_to_alpha(alpha: float, d_renyi: float) -> float:
    """alpha-divergence value (e^{(alpha-1) d_renyi} - 1) / (alpha^2 - alpha)."""
    alpha = _check_alpha(alpha)
    return math.expm1((alpha - 1.0) * float(d_renyi)) / (alpha * alpha - alpha)


def c_alpha(alpha: float) -> float:
    """The constant (alpha-1)^{alpha/(alpha-1)} / alpha from the alpha-divergence dual."""
    alpha = _check_alpha(alpha)
    return (alpha - 1.0) ** (alpha / (alpha - 1.0)) / alpha


def dual_max(alpha: float, X: float) -> float:
    """max over a > 0 of a - X a^{alpha/(alpha-1)}, in closed form.

    Equals (alpha-1)^{alpha-1} / (alpha^alpha X^{alpha-1}).
    """
    alpha = _check_alpha(alpha)
    X = _check_positive("X", X)
    return (alpha - 1.0) ** (alpha - 1.0) / (alpha**alpha * X ** (alpha - 1.0))


# ---------------------------------------------------------------------------
# Crossover orders: where the analytic linear upper bound beats the exact
# unrestricted Renyi value
# ---------------------------------------------------------------------------


def _crossover(upper, exact, alpha_min, alpha_max, step) -> float:
    n = int(round((alpha_max - alpha_min) / step))
    for i in range(n + 1):
        a = alpha_min + i * step
        if upper(a) < exact(a):
            return a
    raise ValueError(f"no crossover found in [{alpha_min}, {alpha_max}]")


def laplace_crossover_alpha(
    eps: float, alpha_min: float = 2.01, alpha_max: float = 8.0, step: float = 0.01
) -> float:
    """Smallest grid order where the Laplace linear upper bound drops below
    the exact unrestricted Renyi value (unit shift)."""
    eps = _check_positive("eps", eps)
    return _crossover(
        lambda a: lin_renyi_upper_laplace(a, eps, [1.0]).value,
        lambda a: renyi_laplace_exact(a, eps, [1.0]).value,
        alpha_min,
        alpha_max,
        step,
    )


def gaussian_crossover_alpha(
    sigma: float, alpha_min: float = 2.01, alpha_max: float = 8.0, step: float = 0.01
) -> float:
    """Gaussian analogue of ``laplace_crossover_alpha``."""
    sigma = _check_positive("sigma", sigma)
    return _crossover(
        lambda a: lin_renyi_upper_gaussian(a, sigma, [1.0]).value,
        lambda a: renyi_gaussian_exact(a, sigma, [1.0]).value,
        alpha_min,
        alpha_max,
        step,
    )
