"""Integral probability metrics, the restricted Pinsker-like inequality,
and the generalization-gap experiment on finite instance spaces.

The adversary class on query space is built from point evaluations
h_x(q) = q(x): convex combinations of the evaluations and their
negations, plus an offset projected so the range stays inside [-1, 1].
Because the evaluation tables take values in [0, 1], this class is
convex, closed under negation, and contains every constant in [-1, 1].
Full translation invariance conflicts with the bounded range as a
literal set property; the inequality is therefore checked empirically on
this closest realizable class.

For such a class the IPM is a finite maximization over the extreme
functions (offsets cancel in the mean discrepancy), while the restricted
KL is a small concave program over the convex weights and the offset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .distributions import Discrete

__all__ = [
    "QueryFamily",
    "EvalClass",
    "AllBoundedFunctions",
    "SelectionRule",
    "PinskerResult",
    "GeneralizationResult",
    "ipm",
    "signed_ipm",
    "eval_class_kl",
    "pinsker_check",
    "generalization_experiment",
    "neighbor_kl_parameter",
]


@dataclass(frozen=True)
class QueryFamily:
    """A finite family of statistical queries over a finite instance space.

    ``tables[j, i]`` is the value of query j on instance i, in [0, 1].
    """

    labels: tuple
    tables: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        tables = np.atleast_2d(np.asarray(self.tables, dtype=float))
        object.__setattr__(self, "tables", tables)
        if tables.shape[1] != len(self.labels):
            raise ValueError("tables must have one column per instance label")
        if np.any(tables < 0) or np.any(tables > 1):
            raise ValueError("query values must lie in [0, 1]")

    @property
    def num_queries(self) -> int:
        return self.tables.shape[0]

    def eval_class(self) -> "EvalClass":
        """The evaluation class over this family's query space."""
        return EvalClass(self.tables.T)


@dataclass(frozen=True)
class EvalClass:
    """Convex, negation-closed, range-clipped span of evaluation functions.

    ``tables[k, j]`` is the value of base function k on output j, each in
    [0, 1]. Members are sum_k w_k g_k + c with w a convex weight vector
    over the base functions and their negations, and c an offset kept
    inside the feasible band so that all values stay in [-1, 1].
    """

    tables: np.ndarray

    def __post_init__(self):
        tables = np.atleast_2d(np.asarray(self.tables, dtype=float))
        object.__setattr__(self, "tables", tables)
        if np.any(tables < 0) or np.any(tables > 1):
            raise ValueError("evaluation tables must take values in [0, 1]")

    @property
    def num_outputs(self) -> int:
        return self.tables.shape[1]

    def extremes(self) -> np.ndarray:
        """Value tables of the extreme functions {g_k, -g_k}."""
        return np.vstack([self.tables, -self.tables])


@dataclass(frozen=True)
class AllBoundedFunctions:
    """The unrestricted class of functions with range [-1, 1]."""


def _probs(dist, num_outputs: int) -> np.ndarray:
    if isinstance(dist, Discrete):
        if len(dist.probs) != num_outputs:
            raise ValueError("distribution support does not match the output space")
        return np.asarray(dist.probs)
    p = np.asarray(dist, dtype=float)
    if p.shape != (num_outputs,):
        raise ValueError("probability vector does not match the output space")
    return p


def ipm(P, Q, cls) -> float:
    """Integral probability metric sup_h |E_P[h] - E_Q[h]| over the class.

    For the unrestricted [-1, 1] class this equals twice the total
    variation distance. For an evaluation class the offset cancels and
    the supremum over the convex hull is attained at an extreme function,
    so the value is a finite maximization; negation closure makes the
    signed supremum equal the absolute one.
    """
    if isinstance(cls, AllBoundedFunctions):
        p = np.asarray(P.probs if isinstance(P, Discrete) else P, dtype=float)
        q = np.asarray(Q.probs if isinstance(Q, Discrete) else Q, dtype=float)
        return float(np.abs(p - q).sum())
    p = _probs(P, cls.num_outputs)
    q = _probs(Q, cls.num_outputs)
    diffs = cls.extremes() @ (p - q)
    return float(diffs.max()) if diffs.size else 0.0


def signed_ipm(P, Q, cls: EvalClass) -> float:
    """The supremum of E_P[h] - E_Q[h] without the absolute value."""
    p = _probs(P, cls.num_outputs)
    q = _probs(Q, cls.num_outputs)
    diffs = cls.extremes() @ (p - q)
    return float(diffs.max()) if diffs.size else 0.0


def _kl_discrete(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > 0
    if np.any(mask & (q == 0)):
        raise ValueError("P has mass where Q has none")
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def eval_class_kl(P, Q, cls: EvalClass, tol: float = 1e-9) -> float:
    """Restricted KL divergence sup_{h in class} E_P[h] - E_Q[e^{h-1}].

    A concave objective over the convex weights and offset, maximized
    with SLSQP under the simplex and range constraints from several
    starts. The constant function 1 is always feasible and gives 0, so
    the value is nonnegative.
    """
    ext = cls.extremes()
    k, m = ext.shape
    p = _probs(P, m)
    q = _probs(Q, m)

    def neg_objective(z):
        h = z[:k] @ ext + z[k]
        e = np.exp(h - 1.0)
        value = float(h @ p - e @ q)
        grad_w = ext @ p - ext @ (e * q)
        grad_c = 1.0 - float(e @ q)
        return -value, -np.concatenate([grad_w, [grad_c]])

    constraints = [
        {"type": "eq", "fun": lambda z: z[:k].sum() - 1.0, "jac": lambda z: np.concatenate([np.ones(k), [0.0]])},
        # range constraints 1 - |h(j)| >= 0, linear in (w, c)
        {"type": "ineq", "fun": lambda z: 1.0 - (z[:k] @ ext + z[k]),
         "jac": lambda z: -np.column_stack([ext.T, np.ones(m)])},
        {"type": "ineq", "fun": lambda z: (z[:k] @ ext + z[k]) + 1.0,
         "jac": lambda z: np.column_stack([ext.T, np.ones(m)])},
    ]
    bounds = [(0.0, 1.0)] * k + [(-2.0, 2.0)]

    starts = [np.concatenate([np.full(k, 1.0 / k), [1.0]])]
    for j in range(k):
        w = np.zeros(k)
        w[j] = 1.0
        hj = ext[j]
        c = float(np.clip(1.0 - hj.max(), -1.0 - hj.min(), 1.0 - hj.max()))
        starts.append(np.concatenate([w, [c]]))

    best = 0.0  # h = 1 is feasible and attains exactly 0
    for z0 in starts:
        res = scipy.optimize.minimize(
            neg_objective,
            z0,
            jac=True,
            bounds=bounds,
            constraints=constraints,
            method="SLSQP",
            options={"maxiter": 200, "ftol": 1e-12},
        )
        if res.fun is not None and math.isfinite(res.fun):
            best = max(best, -float(res.fun))
    return best


@dataclass(frozen=True)
class PinskerResult:
    ipm: float
    kl_restricted: float
    bound: float
    holds: bool


def pinsker_check(P, Q, cls, tol: float = 1e-9) -> PinskerResult:
    """Check IPM(P, Q) <= 8 sqrt(restricted KL(P, Q)) on one instance.

    For the unrestricted bounded class the IPM is 2 TV and the KL is the
    plain divergence; for evaluation classes both sides use the class.
    """
    metric = ipm(P, Q, cls)
    if isinstance(cls, AllBoundedFunctions):
        p = np.asarray(P.probs if isinstance(P, Discrete) else P, dtype=float)
        q = np.asarray(Q.probs if isinstance(Q, Discrete) else Q, dtype=float)
        kl = _kl_discrete(p, q)
    else:
        kl = eval_class_kl(P, Q, cls, tol)
    bound = 8.0 * math.sqrt(max(kl, 0.0))
    return PinskerResult(metric, kl, bound, metric <= bound + 1e-9)


# ---------------------------------------------------------------------------
# Generalization experiment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SelectionRule:
    """How the analyst picks a query after seeing the sample.

    ``softmax`` weights queries by exp(temperature * sample mean),
    ``constant`` ignores the sample, ``argmax`` deterministically picks
    the highest sample mean (ties to the lowest index).
    """

    kind: str
    temperature: float = 1.0
    index: int = 0

    def query_distribution(self, sample_means: np.ndarray) -> np.ndarray:
        means = np.asarray(sample_means, dtype=float)
        if self.kind == "softmax":
            z = self.temperature * means
            z = z - z.max(axis=-1, keepdims=True)
            e = np.exp(z)
            return e / e.sum(axis=-1, keepdims=True)
        if self.kind == "constant":
            out = np.zeros(means.shape)
            out[..., self.index] = 1.0
            return out
        if self.kind == "argmax":
            out = np.zeros(means.shape)
            idx = np.argmax(means, axis=-1)
            if means.ndim == 1:
                out[idx] = 1.0
            else:
                out[np.arange(means.shape[0]), idx] = 1.0
            return out
        raise ValueError(f"unknown selection rule {self.kind!r}")


def _count_vectors(total: int, bins: int):
    if bins == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _count_vectors(total - first, bins - 1):
            yield (first, *rest)


def neighbor_kl_parameter(family: QueryFamily, rule: SelectionRule, n: int,
                          tol: float = 1e-9) -> float:
    """Worst-case evaluation-class KL between selections on neighboring samples.

    Enumerates sample count vectors and all single-element replacements.
    Deterministic selections on neighboring samples can concentrate on
    different queries; that absolute-continuity break is reported as
    +inf, flagging a non-private release.
    """
    num_x = len(family.labels)
    cls = family.eval_class()
    qt = family.tables  # (num_queries, num_x)
    worst = 0.0
    dists = {}
    for counts in _count_vectors(n, num_x):
        means = (np.asarray(counts, dtype=float) / n) @ qt.T
        dists[counts] = rule.query_distribution(means)
    for counts, p in dists.items():
        for i in range(num_x):
            if counts[i] == 0:
                continue
            for j in range(num_x):
                if j == i:
                    continue
                moved = list(counts)
                moved[i] -= 1
                moved[j] += 1
                q = dists[tuple(moved)]
                if np.array_equal(p, q):
                    continue
                if np.any((p > 0) & (q == 0)):
                    return math.inf
                worst = max(worst, eval_class_kl(p, q, cls, tol))
    return worst


@dataclass(frozen=True)
class GeneralizationResult:
    gap: float
    stderr: float
    epsilon_hkl: float
    bound: float
    holds: bool


def generalization_experiment(
    family: QueryFamily,
    rule: SelectionRule,
    data_dist: Discrete,
    n: int,
    trials: int,
    seed: int,
    tol: float = 1e-9,
) -> GeneralizationResult:
    """Monte Carlo estimate of the generalization gap against 8 sqrt(eps).

    Draws ``trials`` samples of size n from the data distribution, lets
    the selection rule pick a query per sample, and averages the
    difference between the query's sample mean and its population mean
    (compensated summation). The restricted-KL parameter of the rule is
    computed exactly by neighbor enumeration, and the check passes when
    |gap| <= 8 sqrt(eps) + 3 Monte Carlo standard errors.
    """
    num_x = len(family.labels)
    px = np.asarray(data_dist.probs)
    if len(px) != num_x:
        raise ValueError("data distribution must live on the instance space")
    eps = neighbor_kl_parameter(family, rule, n, tol)

    rng = np.random.default_rng(seed)
    samples = rng.choice(num_x, size=(trials, n), p=px)
    counts = np.zeros((trials, num_x))
    for pos in range(n):
        np.add.at(counts, (np.arange(trials), samples[:, pos]), 1.0)
    means = (counts / n) @ family.tables.T  # (trials, num_queries)
    probs = rule.query_distribution(means)
    picks = (rng.random(trials)[:, None] > np.cumsum(probs, axis=1)).sum(axis=1)
    picks = np.minimum(picks, family.num_queries - 1)
    pop_means = family.tables @ px
    gaps = means[np.arange(trials), picks] - pop_means[picks]
    gap = math.fsum(gaps.tolist()) / trials
    stderr = float(gaps.std(ddof=1)) / math.sqrt(trials)
    bound = 8.0 * math.sqrt(eps) if math.isfinite(eps) else math.inf
    holds = abs(gap) <= bound + 3.0 * stderr
    return GeneralizationResult(gap, stderr, eps, bound, holds)
