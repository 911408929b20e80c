"""Executable privacy mechanisms and their privacy reports.

Laplace, Gaussian, and matrix mechanisms that produce noisy outputs, the
small dense linear algebra the matrix mechanism needs, and a ``report``
dispatcher that attaches the tightest available privacy parameter for a
(mechanism, adversary class, divergence) triple with an honest bound
kind: closed forms are exact, analytic bounds are upper, converged dual
values are lower.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .closed_form import (
    BoundKind,
    BoundedValue,
    DivergenceSpec,
    kl_gaussian_exact,
    kl_laplace_shift,
    lin_kl_laplace_shift,
    lin_renyi_upper_gaussian,
    lin_renyi_upper_laplace,
    renyi_gaussian_exact,
    renyi_laplace_exact,
)
from .distributions import Gaussian, Laplace, sample
from .variational import FunctionClass, restricted_kl, restricted_renyi

__all__ = [
    "LaplaceMechanism",
    "GaussianMechanism",
    "MatrixMechanism",
    "PrivacyReport",
    "RankDeficiencyError",
    "UnsupportedCombinationError",
    "run_laplace",
    "run_gaussian",
    "run_matrix_mechanism",
    "pseudo_inverse",
    "column_l1_norm",
    "matrix_renyi_upper",
    "report",
    "mechanism_from_json",
    "report_to_json",
]


class RankDeficiencyError(ValueError):
    """The strategy matrix does not have full column rank."""


class UnsupportedCombinationError(ValueError):
    """No analytic privacy parameter is available for the requested triple."""


@dataclass(frozen=True)
class LaplaceMechanism:
    """Adds i.i.d. Laplace(0, 1/eps) noise per coordinate.

    ``sensitivity`` holds the worst-case per-coordinate change of the
    query when one record changes; it enters the privacy analysis, not
    the noise itself. ``zero_noise`` is an explicit test hook that skips
    the noise entirely.
    """

    sensitivity: tuple
    eps: float
    zero_noise: bool = False

    def __post_init__(self):
        object.__setattr__(self, "sensitivity", tuple(float(v) for v in self.sensitivity))
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not all(math.isfinite(v) for v in self.sensitivity):
            raise ValueError("sensitivity entries must be finite")

    @property
    def dim(self) -> int:
        return len(self.sensitivity)

    def describe(self) -> str:
        return f"laplace(eps={self.eps:g}, d={self.dim})"


@dataclass(frozen=True)
class GaussianMechanism:
    """Adds i.i.d. N(0, sigma^2) noise per coordinate."""

    sensitivity: tuple
    sigma: float
    zero_noise: bool = False

    def __post_init__(self):
        object.__setattr__(self, "sensitivity", tuple(float(v) for v in self.sensitivity))
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not all(math.isfinite(v) for v in self.sensitivity):
            raise ValueError("sensitivity entries must be finite")

    @property
    def dim(self) -> int:
        return len(self.sensitivity)

    def describe(self) -> str:
        return f"gaussian(sigma={self.sigma:g}, d={self.dim})"


@dataclass(frozen=True, eq=False)
class MatrixMechanism:
    """Answers the query workload W by noising Ax and mapping back.

    Releases W A^+ (A x + ||A||_1 eta) with eta i.i.d. Laplace(0, 1/eps)
    of length s, where A is an s x n strategy matrix of full column rank
    and ||A||_1 is the maximum column L1 norm.
    """

    workload: np.ndarray
    strategy: np.ndarray
    eps: float
    zero_noise: bool = False

    def __post_init__(self):
        w = np.atleast_2d(np.asarray(self.workload, dtype=float))
        a = np.atleast_2d(np.asarray(self.strategy, dtype=float))
        object.__setattr__(self, "workload", w)
        object.__setattr__(self, "strategy", a)
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if a.shape[0] < a.shape[1]:
            raise ValueError("strategy matrix needs at least as many rows as columns")
        if w.shape[1] != a.shape[1]:
            raise ValueError("workload and strategy must agree on the data dimension")

    @property
    def rows(self) -> int:
        return self.strategy.shape[0]

    def describe(self) -> str:
        d, n = self.workload.shape
        return f"matrix(eps={self.eps:g}, s={self.rows}, n={n}, d={d})"


@dataclass(frozen=True)
class PrivacyReport:
    """A privacy parameter for one mechanism against one adversary class.

    ``epsilon`` carries the value together with whether it is exact, an
    analytic upper bound, or a numerical lower bound.
    """

    mechanism: str
    function_class: object
    divergence: DivergenceSpec
    epsilon: BoundedValue
    output_dim: int = 1


def run_laplace(mech: LaplaceMechanism, query_answer, seed: int) -> np.ndarray:
    answer = np.asarray(query_answer, dtype=float)
    if answer.shape != (mech.dim,):
        raise ValueError(f"query answer must have length {mech.dim}")
    if mech.zero_noise:
        return answer.copy()
    noise = sample(Laplace(0.0, 1.0 / mech.eps), seed, mech.dim)
    return answer + noise


def run_gaussian(mech: GaussianMechanism, query_answer, seed: int) -> np.ndarray:
    answer = np.asarray(query_answer, dtype=float)
    if answer.shape != (mech.dim,):
        raise ValueError(f"query answer must have length {mech.dim}")
    if mech.zero_noise:
        return answer.copy()
    noise = sample(Gaussian(0.0, mech.sigma), seed, mech.dim)
    return answer + noise


def pseudo_inverse(a: np.ndarray) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a full-column-rank matrix.

    Computed from an orthogonal-triangular factorization with column
    pivoting; raises RankDeficiencyError when the smallest triangular
    diagonal falls below 1e-10 times the largest.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    q, r, piv = scipy.linalg.qr(a, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag.min() < 1e-10 * diag.max():
        raise RankDeficiencyError("strategy matrix is rank deficient")
    pinv_pivoted = scipy.linalg.solve_triangular(r, q.T)
    out = np.empty_like(pinv_pivoted)
    out[piv, :] = pinv_pivoted
    return out


def column_l1_norm(a: np.ndarray) -> float:
    """Maximum L1 norm over the columns of ``a``."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        raise ValueError("matrix must be nonempty")
    return float(np.abs(a).sum(axis=0).max())


def run_matrix_mechanism(mech: MatrixMechanism, x, seed: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = mech.strategy.shape[1]
    if x.shape != (n,):
        raise ValueError(f"data vector must have length {n}")
    a_pinv = pseudo_inverse(mech.strategy)
    ax = mech.strategy @ x
    if mech.zero_noise:
        noisy = ax
    else:
        eta = sample(Laplace(0.0, 1.0 / mech.eps), seed, mech.rows)
        noisy = ax + column_l1_norm(mech.strategy) * eta
    return mech.workload @ (a_pinv @ noisy)


def matrix_renyi_upper(alpha: float, eps: float, s: int) -> BoundedValue:
    """Linear-adversary Renyi bound (1/(a-1)) log(1 + 2^{s(a-1)} eps^a).

    ``s`` is the noise dimension (rows of the strategy matrix); the bound
    follows from the s-dimensional Laplace bound plus linear
    post-processing and inherits the alpha > 2 requirement.
    """
    alpha = float(alpha)
    if not alpha > 2.0:
        raise ValueError("the matrix mechanism bound requires order alpha > 2")
    value = math.log1p(2.0 ** (s * (alpha - 1.0)) * eps**alpha) / (alpha - 1.0)
    return BoundedValue(value, BoundKind.UPPER)


def _noise_pair(mech):
    """Output distributions (P, Q) for neighboring inputs of a scalar mechanism."""
    v = mech.sensitivity[0]
    if isinstance(mech, LaplaceMechanism):
        scale = 1.0 / mech.eps
        return Laplace(0.0, scale), Laplace(v, scale)
    return Gaussian(0.0, mech.sigma), Gaussian(v, mech.sigma)


def report(mech, fclass: FunctionClass, spec: DivergenceSpec, tol: float = 1e-9) -> PrivacyReport:
    """Privacy parameter for (mechanism, class, divergence).

    Laplace and Gaussian mechanisms against linear or unrestricted
    adversaries under KL or Renyi use closed forms and analytic bounds;
    the matrix mechanism supports linear adversaries under Renyi of order
    alpha > 2; polynomial classes over scalar outputs route to the
    variational optimizer and come back as numerical lower bounds. Any
    other triple raises UnsupportedCombinationError naming the
    variational fallback.
    """
    if isinstance(mech, MatrixMechanism):
        if fclass.kind == "linear" and spec.kind == "renyi" and spec.alpha > 2.0:
            pseudo_inverse(mech.strategy)  # surfaces rank deficiency early
            return PrivacyReport(
                mech.describe(),
                fclass,
                spec,
                matrix_renyi_upper(spec.alpha, mech.eps, mech.rows),
                output_dim=mech.workload.shape[0],
            )
        raise UnsupportedCombinationError(
            "the matrix mechanism only has an analytic parameter for linear adversaries "
            "under Renyi divergence of order alpha > 2; compute other combinations "
            "numerically with the variational optimizer"
        )

    if not isinstance(mech, (LaplaceMechanism, GaussianMechanism)):
        raise TypeError(f"unsupported mechanism {type(mech).__name__}")
    v = mech.sensitivity

    if fclass.kind == "poly":
        if mech.dim != 1:
            raise UnsupportedCombinationError(
                "polynomial adversary classes are defined over scalar outputs only"
            )
        P, Q = _noise_pair(mech)
        if spec.kind == "kl":
            sol = restricted_kl(P, Q, fclass, tol)
            value = BoundedValue(max(sol.objective_value, 0.0), BoundKind.LOWER)
        elif spec.kind == "renyi":
            value = restricted_renyi(P, Q, fclass, spec.alpha, tol)
        else:
            raise UnsupportedCombinationError(
                f"no parameter for polynomial adversaries under {spec.describe()}"
            )
        return PrivacyReport(mech.describe(), fclass, spec, value, output_dim=1)

    if fclass.kind not in ("linear", "all"):
        raise UnsupportedCombinationError(
            f"no analytic parameter for class {fclass.describe()}; "
            "compute it numerically with the variational optimizer"
        )

    if spec.kind == "kl":
        if isinstance(mech, LaplaceMechanism):
            value = lin_kl_laplace_shift(mech.eps, v) if fclass.kind == "linear" else kl_laplace_shift(mech.eps, v)
        else:
            # Equal-variance Gaussian pairs: linear and unrestricted agree.
            shift = math.sqrt(sum(vi * vi for vi in v))
            value = kl_gaussian_exact(0.0, shift, mech.sigma)
        return PrivacyReport(mech.describe(), fclass, spec, value, output_dim=mech.dim)

    if spec.kind == "renyi":
        if fclass.kind == "all":
            if isinstance(mech, LaplaceMechanism):
                value = renyi_laplace_exact(spec.alpha, mech.eps, v)
            else:
                value = renyi_gaussian_exact(spec.alpha, mech.sigma, v)
        else:
            if not spec.alpha > 2.0:
                raise UnsupportedCombinationError(
                    "the linear-adversary Renyi bound is only proven for alpha > 2; "
                    "compute smaller orders numerically with the variational optimizer"
                )
            if isinstance(mech, LaplaceMechanism):
                value = lin_renyi_upper_laplace(spec.alpha, mech.eps, v)
            else:
                value = lin_renyi_upper_gaussian(spec.alpha, mech.sigma, v)
        return PrivacyReport(mech.describe(), fclass, spec, value, output_dim=mech.dim)

    raise UnsupportedCombinationError(
        f"no analytic parameter under {spec.describe()}; "
        "compute it numerically with the variational optimizer"
    )


# ---------------------------------------------------------------------------
# JSON configuration
# ---------------------------------------------------------------------------


def _load_matrix(value, base_dir):
    if isinstance(value, str):
        import os

        path = value if os.path.isabs(value) else os.path.join(base_dir or ".", value)
        return np.atleast_2d(np.loadtxt(path, delimiter=",", ndmin=2))
    return np.atleast_2d(np.asarray(value, dtype=float))


def mechanism_from_json(obj: dict, base_dir: str | None = None):
    """Build a mechanism from its JSON configuration.

    Matrices may be inline row-major lists or paths to headerless CSV
    files (resolved relative to ``base_dir``).
    """
    kind = obj["kind"]
    zero_noise = bool(obj.get("zero_noise", False))
    if kind == "laplace":
        return LaplaceMechanism(tuple(obj["sensitivity"]), float(obj["eps"]), zero_noise)
    if kind == "gaussian":
        return GaussianMechanism(tuple(obj["sensitivity"]), float(obj["sigma"]), zero_noise)
    if kind == "matrix":
        return MatrixMechanism(
            _load_matrix(obj["workload"], base_dir),
            _load_matrix(obj["strategy"], base_dir),
            float(obj["eps"]),
            zero_noise,
        )
    raise ValueError(f"unknown mechanism kind {kind!r}")


def report_to_json(rep: PrivacyReport) -> dict:
    fc = rep.function_class
    return {
        "mechanism": rep.mechanism,
        "class": fc.describe() if hasattr(fc, "describe") else str(fc),
        "divergence": rep.divergence.describe(),
        "epsilon": rep.epsilon.value,
        "bound_kind": rep.epsilon.bound_kind.value,
        "output_dim": rep.output_dim,
    }
