"""Probability-distribution primitives.

One-dimensional distributions (Laplace, Gaussian, point mass, finite
discrete), independent products of them, and the numerical machinery the
rest of the toolkit leans on: densities, moments, moment generating
functions, deterministic sampling, and expectation by adaptive
Gauss-Legendre quadrature.

All values are immutable and all operations are pure functions of their
inputs, so they are safe to share across threads; parallel parameter
sweeps only need per-task seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

__all__ = [
    "Laplace",
    "Gaussian",
    "PointMass",
    "Discrete",
    "Dist1D",
    "ProductDist",
    "QuadratureError",
    "pdf",
    "mgf",
    "log_mgf_derivatives",
    "mean",
    "abs_moment",
    "expect",
    "enumerate_support",
    "sample",
    "support_interval",
    "dist_to_json",
    "dist_from_json",
]

# Tail mass dropped per coordinate when a continuous support is truncated
# for quadrature; far below every tolerance used downstream.
_MASS_CUTOFF = 1e-13

_GL_ORDER = 20
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)


class QuadratureError(RuntimeError):
    """Raised when adaptive quadrature cannot reach the requested tolerance."""


@dataclass(frozen=True)
class Laplace:
    """Laplace distribution with location ``loc`` and scale ``scale`` > 0."""

    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError(f"Laplace scale must be positive, got {self.scale}")


@dataclass(frozen=True)
class Gaussian:
    """Normal distribution with mean ``mean`` and standard deviation ``stddev`` > 0."""

    mean: float = 0.0
    stddev: float = 1.0

    def __post_init__(self):
        if not self.stddev > 0:
            raise ValueError(f"Gaussian stddev must be positive, got {self.stddev}")


@dataclass(frozen=True)
class PointMass:
    """Degenerate distribution concentrated at ``loc``."""

    loc: float = 0.0


@dataclass(frozen=True)
class Discrete:
    """Finite discrete distribution over a strictly increasing real support.

    Probabilities must be nonnegative and sum to 1 within 1e-12.
    """

    support: tuple
    probs: tuple

    def __post_init__(self):
        support = tuple(float(x) for x in self.support)
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)
        if len(support) != len(probs) or not support:
            raise ValueError("support and probs must be nonempty and equal length")
        if any(s2 <= s1 for s1, s2 in zip(support, support[1:])):
            raise ValueError("support values must be strictly increasing")
        if any(p < 0 for p in probs):
            raise ValueError("probabilities must be nonnegative")
        if abs(sum(probs) - 1.0) > 1e-12:
            raise ValueError(f"probabilities must sum to 1, got {sum(probs)!r}")


Dist1D = Union[Laplace, Gaussian, PointMass, Discrete]


@dataclass(frozen=True)
class ProductDist:
    """Independent product of one-dimensional marginals."""

    marginals: tuple

    def __post_init__(self):
        marginals = tuple(self.marginals)
        object.__setattr__(self, "marginals", marginals)
        if not marginals:
            raise ValueError("a product distribution needs at least one marginal")

    @property
    def dim(self) -> int:
        return len(self.marginals)


def pdf(dist: Dist1D, x):
    """Density at ``x``; for PointMass and Discrete, the probability mass at ``x``."""
    if isinstance(dist, Laplace):
        return np.exp(-np.abs(np.asarray(x, dtype=float) - dist.loc) / dist.scale) / (
            2.0 * dist.scale
        )
    if isinstance(dist, Gaussian):
        z = (np.asarray(x, dtype=float) - dist.mean) / dist.stddev
        return np.exp(-0.5 * z * z) / (dist.stddev * math.sqrt(2.0 * math.pi))
    if isinstance(dist, PointMass):
        return np.where(np.asarray(x, dtype=float) == dist.loc, 1.0, 0.0)[()]
    if isinstance(dist, Discrete):
        xs = np.asarray(x, dtype=float)
        out = np.zeros_like(xs, dtype=float)
        for s, p in zip(dist.support, dist.probs):
            out = np.where(xs == s, p, out)
        return out[()]
    raise TypeError(f"unsupported distribution {type(dist).__name__}")


def mean(dist: Dist1D) -> float:
    if isinstance(dist, Laplace):
        return dist.loc
    if isinstance(dist, Gaussian):
        return dist.mean
    if isinstance(dist, PointMass):
        return dist.loc
    if isinstance(dist, Discrete):
        return float(np.dot(dist.support, dist.probs))
    raise TypeError(f"unsupported distribution {type(dist).__name__}")


def mgf(dist: Dist1D, a: float) -> float:
    """Moment generating function E[e^{aX}].

    Returns ``math.inf`` (a value, not an exception) where the integral
    diverges; dual optimizers treat that as an infinite barrier. For the
    Laplace distribution the MGF is finite only for |a| < 1/scale.
    """
    a = float(a)
    if isinstance(dist, Laplace):
        if abs(a) * dist.scale >= 1.0:
            return math.inf
        return math.exp(a * dist.loc) / (1.0 - (a * dist.scale) ** 2)
    if isinstance(dist, Gaussian):
        return math.exp(a * dist.mean + 0.5 * (a * dist.stddev) ** 2)
    if isinstance(dist, PointMass):
        return math.exp(a * dist.loc)
    if isinstance(dist, Discrete):
        return float(np.dot(dist.probs, np.exp(a * np.asarray(dist.support))))
    raise TypeError(f"unsupported distribution {type(dist).__name__}")


def log_mgf_derivatives(dist: Dist1D, a: float):
    """(log-MGF, first derivative, second derivative) at ``a``.

    Returns ``(inf, nan, nan)`` outside the convergence region.
    """
    a = float(a)
    if isinstance(dist, Laplace):
        ab = a * dist.scale
        if abs(ab) >= 1.0:
            return math.inf, math.nan, math.nan
        denom = 1.0 - ab * ab
        value = a * dist.loc - math.log(denom)
        d1 = dist.loc + 2.0 * a * dist.scale**2 / denom
        d2 = 2.0 * dist.scale**2 * (1.0 + ab * ab) / denom**2
        return value, d1, d2
    if isinstance(dist, Gaussian):
        var = dist.stddev**2
        return a * dist.mean + 0.5 * a * a * var, dist.mean + a * var, var
    if isinstance(dist, PointMass):
        return a * dist.loc, dist.loc, 0.0
    if isinstance(dist, Discrete):
        xs = np.asarray(dist.support)
        ws = np.asarray(dist.probs)
        # Shift by max(a*x) for overflow-safe log-sum-exp.
        t = a * xs
        tmax = float(t.max())
        z = ws * np.exp(t - tmax)
        total = float(z.sum())
        m1 = float(np.dot(z, xs)) / total
        m2 = float(np.dot(z, xs * xs)) / total
        return tmax + math.log(total), m1, m2 - m1 * m1
    raise TypeError(f"unsupported distribution {type(dist).__name__}")


def abs_moment(dist: Dist1D, r: float) -> float:
    """Centered absolute moment E|X - center|^r for r >= 1.

    The center is the location parameter (mean). All four kinds admit a
    closed form: Laplace gives scale^r * Gamma(r+1), Gaussian gives
    stddev^r * 2^{r/2} * Gamma((r+1)/2) / sqrt(pi).
    """
    r = float(r)
    if r < 1.0:
        raise ValueError(f"order must be >= 1, got {r}")
    if isinstance(dist, Laplace):
        return dist.scale**r * math.gamma(r + 1.0)
    if isinstance(dist, Gaussian):
        return dist.stddev**r * 2.0 ** (r / 2.0) * math.gamma((r + 1.0) / 2.0) / math.sqrt(math.pi)
    if isinstance(dist, PointMass):
        return 0.0
    if isinstance(dist, Discrete):
        c = mean(dist)
        return float(np.dot(dist.probs, np.abs(np.asarray(dist.support) - c) ** r))
    raise TypeError(f"unsupported distribution {type(dist).__name__}")


def _scale(dist: Dist1D) -> float:
    if isinstance(dist, Laplace):
        return dist.scale
    if isinstance(dist, Gaussian):
        return dist.stddev
    raise TypeError("scale is defined for continuous distributions only")


def support_interval(dist: Dist1D, growth: float = 0.0, tol: float = 1e-9):
    """Truncated support ``(lo, hi)`` covering all but < 1e-12 of the mass.

    The base cutoffs are loc +/- scale*ln(2/1e-13) for Laplace and
    mean +/- 8.5*stddev for Gaussian. When ``growth`` > 0 the interval is
    widened until |x - center|^growth * pdf(x) * scale < tol/16, so that
    polynomially growing integrands keep their absolute error budget.
    """
    if isinstance(dist, Laplace):
        center, s = dist.loc, dist.scale
        half = s * math.log(2.0 / _MASS_CUTOFF)
    elif isinstance(dist, Gaussian):
        center, s = dist.mean, dist.stddev
        half = 8.5 * s
    else:
        raise TypeError("support_interval is defined for continuous distributions only")
    if growth > 0.0:
        threshold = max(tol, 1e-300) / 16.0
        for _ in range(400):
            x = center + half
            envelope = abs(half) ** growth * float(pdf(dist, x)) * s
            if envelope < threshold:
                break
            half += s
        else:
            raise QuadratureError(
                f"could not truncate tails of {dist!r} for growth exponent {growth}"
            )
    return center - half, center + half


def _eval_vec(f: Callable, xs: np.ndarray) -> np.ndarray:
    """Evaluate an integrand on a 1-d array, falling back to a scalar loop."""
    arr = np.asarray(f(xs), dtype=float)
    if arr.shape == xs.shape:
        return arr
    if arr.ndim == 0:
        return np.array([float(f(x)) for x in xs])
    raise ValueError("integrand returned an array of unexpected shape")


def _gl_panel(f: Callable, lo: float, hi: float) -> float:
    half = 0.5 * (hi - lo)
    xs = 0.5 * (lo + hi) + half * _GL_NODES
    return half * float(np.dot(_GL_WEIGHTS, _eval_vec(f, xs)))


def _adaptive(f, lo, hi, coarse, tol, budget) -> float:
    """Recursive bisection with fixed-order panels; refines until the
    panel-sum change drops below the local tolerance."""
    mid = 0.5 * (lo + hi)
    left = _gl_panel(f, lo, mid)
    right = _gl_panel(f, mid, hi)
    budget[0] -= 1
    if budget[0] < 0:
        raise QuadratureError("quadrature refinement limit reached before tolerance")
    if abs(coarse - (left + right)) <= tol or (hi - lo) < 1e-14 * max(1.0, abs(lo), abs(hi)):
        return left + right
    return _adaptive(f, lo, mid, left, 0.5 * tol, budget) + _adaptive(
        f, mid, hi, right, 0.5 * tol, budget
    )


def _kinks(dist: Dist1D):
    return (dist.loc,) if isinstance(dist, Laplace) else ()


def expect(
    dist,
    integrand: Callable,
    tol: float = 1e-9,
    breakpoints: Sequence[float] = (),
) -> float:
    """Expectation E[f(X)] with absolute error target ``tol``.

    Discrete and point-mass expectations are exact sums. Continuous
    expectations use adaptive bisection with fixed-order Gauss-Legendre
    panels over a truncated support; panels are split at density kinks and
    at any caller-supplied ``breakpoints`` (for example sign changes of a
    polynomial integrand), and the truncation is pushed outward while the
    boundary panels still contribute more than the tolerance, so that
    polynomially bounded integrands converge. Integrands must accept numpy
    arrays; scalar-only callables are detected and looped over.

    For a product distribution the expectation runs over points of shape
    ``(n, d)``. Fully discrete products are exact tensor sums; products
    with continuous marginals use tensor-grid quadrature and require
    dimension <= 4.

    Raises QuadratureError if the refinement limit is reached first.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if isinstance(dist, ProductDist):
        return _expect_product(dist, integrand, tol)
    if isinstance(dist, PointMass):
        return float(integrand(np.asarray(dist.loc, dtype=float)))
    if isinstance(dist, Discrete):
        xs = np.asarray(dist.support)
        return float(np.dot(dist.probs, _eval_vec(integrand, xs)))

    lo, hi = support_interval(dist, tol=tol)
    cuts = sorted({lo, hi, *(b for b in (*_kinks(dist), *breakpoints) if lo < b < hi)})

    def g(xs):
        return _eval_vec(integrand, xs) * pdf(dist, xs)

    budget = [20000]
    n_seg = len(cuts) - 1
    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        total += _adaptive(g, a, b, _gl_panel(g, a, b), 0.5 * tol / n_seg, budget)
    # Extend outward while the tails still matter (heavy polynomial growth).
    step = _scale(dist)
    for sign, edge in ((-1.0, lo), (1.0, hi)):
        for i in range(500):
            a = edge + sign * i * step
            piece = _gl_panel(g, min(a, a + sign * step), max(a, a + sign * step))
            if abs(piece) < 0.125 * tol:
                break
            total += piece
        else:
            raise QuadratureError("tail extension did not converge; integrand grows too fast")
    return total


def _coordinate_rule(dist: Dist1D, panels: int, tol: float):
    """Per-coordinate nodes and probability-weighted quadrature weights."""
    if isinstance(dist, Discrete):
        return np.asarray(dist.support), np.asarray(dist.probs)
    if isinstance(dist, PointMass):
        return np.array([dist.loc]), np.array([1.0])
    lo, hi = support_interval(dist, tol=tol)
    cuts = sorted({lo, hi, *(k for k in _kinks(dist) if lo < k < hi)})
    edges = np.concatenate(
        [np.linspace(a, b, panels + 1)[:-1] for a, b in zip(cuts, cuts[1:])] + [[hi]]
    )
    half = 0.5 * np.diff(edges)
    mids = edges[:-1] + half
    nodes = (mids[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel() * pdf(dist, nodes)
    return nodes, weights


def _tensor_points(rules):
    grids = np.meshgrid(*(r[0] for r in rules), indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=-1)
    w = rules[0][1]
    for _, wi in rules[1:]:
        w = np.multiply.outer(w, wi)
    return points, w.ravel()


def _expect_product(dist: ProductDist, integrand, tol: float) -> float:
    continuous = [m for m in dist.marginals if isinstance(m, (Laplace, Gaussian))]
    if not continuous:
        points, w = _tensor_points([_coordinate_rule(m, 1, tol) for m in dist.marginals])
        return float(np.dot(w, np.asarray(integrand(points), dtype=float)))
    if dist.dim > 4:
        raise ValueError("tensor-grid quadrature supports at most 4 coupled coordinates")
    panels, estimate = 2, None
    while True:
        points, w = _tensor_points([_coordinate_rule(m, panels, tol) for m in dist.marginals])
        new = float(np.dot(w, np.asarray(integrand(points), dtype=float)))
        if estimate is not None and abs(new - estimate) <= tol:
            return new
        if points.shape[0] * 2**dist.dim > 6_000_000:
            raise QuadratureError("tensor-grid refinement limit reached before tolerance")
        estimate, panels = new, panels * 2


def enumerate_support(dist):
    """Exact (points, probabilities) for finitely supported distributions.

    Accepts Discrete, PointMass, or a product of them; product points have
    shape ``(n, d)``. Raises TypeError for continuous distributions.
    """
    if isinstance(dist, Discrete):
        return np.asarray(dist.support), np.asarray(dist.probs)
    if isinstance(dist, PointMass):
        return np.array([dist.loc]), np.array([1.0])
    if isinstance(dist, ProductDist):
        if any(isinstance(m, (Laplace, Gaussian)) for m in dist.marginals):
            raise TypeError("product has continuous marginals; support is not finite")
        return _tensor_points([enumerate_support(m) for m in dist.marginals])
    raise TypeError(f"{type(dist).__name__} does not have finite support")


def sample(dist, seed: int, n: int) -> np.ndarray:
    """Draw ``n`` deterministic samples; identical (seed, n) gives identical output.

    Laplace uses inverse-CDF sampling, Gaussian the standard normal
    transform. Product samples have shape ``(n, d)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if isinstance(dist, ProductDist):
        return np.column_stack([_sample_with(rng, m, n) for m in dist.marginals])
    return _sample_with(rng, dist, n)


def _sample_with(rng: np.random.Generator, dist: Dist1D, n: int) -> np.ndarray:
    if isinstance(dist, Laplace):
        u = rng.random(n) - 0.5
        return dist.loc - dist.scale * np.sign(u) * np.log1p(-2.0 * np.abs(u))
    if isinstance(dist, Gaussian):
        return dist.mean + dist.stddev * rng.standard_normal(n)
    if isinstance(dist, PointMass):
        return np.full(n, dist.loc)
    if isinstance(dist, Discrete):
        cums = np.cumsum(dist.probs)
        idx = np.searchsorted(cums, rng.random(n), side="right")
        return np.asarray(dist.support)[np.minimum(idx, len(dist.support) - 1)]
    raise TypeError(f"unsupported distribution {type(dist).__name__}")


def dist_to_json(dist) -> dict:
    if isinstance(dist, Laplace):
        return {"kind": "laplace", "loc": dist.loc, "scale": dist.scale}
    if isinstance(dist, Gaussian):
        return {"kind": "gaussian", "mean": dist.mean, "stddev": dist.stddev}
    if isinstance(dist, PointMass):
        return {"kind": "pointmass", "loc": dist.loc}
    if isinstance(dist, Discrete):
        return {"kind": "discrete", "support": list(dist.support), "probs": list(dist.probs)}
    if isinstance(dist, ProductDist):
        return {"kind": "product", "marginals": [dist_to_json(m) for m in dist.marginals]}
    raise TypeError(f"unsupported distribution {type(dist).__name__}")


def dist_from_json(obj: dict):
    kind = obj["kind"]
    if kind == "laplace":
        return Laplace(float(obj["loc"]), float(obj["scale"]))
    if kind == "gaussian":
        return Gaussian(float(obj["mean"]), float(obj["stddev"]))
    if kind == "pointmass":
        return PointMass(float(obj["loc"]))
    if kind == "discrete":
        return Discrete(tuple(obj["support"]), tuple(obj["probs"]))
    if kind == "product":
        return ProductDist(tuple(dist_from_json(m) for m in obj["marginals"]))
    raise ValueError(f"unknown distribution kind {kind!r}")
