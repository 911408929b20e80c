"""Privacy calculus over capacity-bounded reports.

Combines privacy reports under sequential composition (parameters add),
parallel composition on disjoint inputs (parameters max), data-independent
mixtures (parameter preserved for f-divergences), and post-processing
(parameter preserved when a closure witness is declared), tracking the
resulting adversary class symbolically.

Class hypotheses (convexity, translation invariance, containing the
constants) are checked from declared flags, which are set
correct-by-construction for the built-in classes; they are semantic
properties no type system can verify. Composition here is non-adaptive:
the second mechanism must not be chosen from the first one's output, and
adaptive requests are rejected rather than silently accepted.
"""

from __future__ import annotations

from dataclasses import dataclass

from .closed_form import BoundKind, BoundedValue
from .mechanisms import PrivacyReport
from .variational import FunctionClass

__all__ = [
    "SumClass",
    "ComposedClass",
    "CompositionError",
    "compose_sequential",
    "compose_parallel",
    "mixture",
    "post_process",
    "class_is_convex",
    "class_is_translation_invariant",
    "class_includes_constant",
]


class CompositionError(ValueError):
    """The requested combination violates a calculus hypothesis."""


@dataclass(frozen=True)
class SumClass:
    """The class {h1 + h2 : h1 in left, h2 in right}."""

    left: object
    right: object

    def describe(self) -> str:
        return f"sum({_describe(self.left)}, {_describe(self.right)})"


@dataclass(frozen=True)
class ComposedClass:
    """Functions of the form i(g(.)) for i in ``outer`` and a fixed map kind ``g``."""

    map_description: str
    outer: object

    def describe(self) -> str:
        return f"compose({self.map_description}, {_describe(self.outer)})"


def _describe(cls) -> str:
    return cls.describe() if hasattr(cls, "describe") else str(cls)


def class_is_convex(cls) -> bool:
    if isinstance(cls, SumClass):
        return class_is_convex(cls.left) and class_is_convex(cls.right)
    if isinstance(cls, ComposedClass):
        return class_is_convex(cls.outer)
    return bool(cls.convex)


def class_is_translation_invariant(cls) -> bool:
    if isinstance(cls, SumClass):
        # Adding a constant to h1 + h2 can be absorbed by either operand.
        return class_is_translation_invariant(cls.left) or class_is_translation_invariant(
            cls.right
        )
    if isinstance(cls, ComposedClass):
        return class_is_translation_invariant(cls.outer)
    return bool(cls.translation_invariant)


def class_includes_constant(cls) -> bool:
    if isinstance(cls, SumClass):
        return class_includes_constant(cls.left) or class_includes_constant(cls.right)
    if isinstance(cls, ComposedClass):
        return class_includes_constant(cls.outer)
    return bool(cls.include_constant)


def _sum_class(c1, c2):
    # Two copies of the same linear class over the same features span the
    # same sums, so collapse; otherwise keep the symbolic form.
    if isinstance(c1, FunctionClass) and c1 == c2 and c1.kind == "linear":
        return c1
    return SumClass(c1, c2)


def _require_composable_spec(r1: PrivacyReport, r2: PrivacyReport):
    if r1.divergence != r2.divergence:
        raise CompositionError(
            f"reports use different divergences: {r1.divergence.describe()} vs "
            f"{r2.divergence.describe()}"
        )
    if r1.divergence.kind not in ("kl", "renyi"):
        raise CompositionError(
            "composition is only available for the KL and Renyi divergences, not "
            + r1.divergence.describe()
        )


def _require_class_conditions(r: PrivacyReport, need_constant: bool):
    if not class_is_convex(r.function_class):
        raise CompositionError(f"class {_describe(r.function_class)} is not declared convex")
    if not class_is_translation_invariant(r.function_class):
        raise CompositionError(
            f"class {_describe(r.function_class)} is not declared translation invariant"
        )
    if need_constant and not class_includes_constant(r.function_class):
        raise CompositionError(
            f"class {_describe(r.function_class)} does not contain the constant functions"
        )


def compose_sequential(r1: PrivacyReport, r2: PrivacyReport) -> PrivacyReport:
    """Non-adaptive sequential composition on the same dataset: parameters add.

    Requires both classes convex, translation invariant, and containing a
    constant function; the combined adversary class is the sum class.
    """
    _require_composable_spec(r1, r2)
    _require_class_conditions(r1, need_constant=True)
    _require_class_conditions(r2, need_constant=True)
    return PrivacyReport(
        mechanism=f"seq({r1.mechanism}, {r2.mechanism})",
        function_class=_sum_class(r1.function_class, r2.function_class),
        divergence=r1.divergence,
        epsilon=BoundedValue(r1.epsilon.value + r2.epsilon.value, BoundKind.UPPER),
        output_dim=r1.output_dim + r2.output_dim,
    )


def compose_parallel(r1: PrivacyReport, r2: PrivacyReport) -> PrivacyReport:
    """Parallel composition on disjoint datasets: parameters max.

    The caller asserts disjointness by choosing this operation; classes
    must be convex and translation invariant.
    """
    _require_composable_spec(r1, r2)
    _require_class_conditions(r1, need_constant=False)
    _require_class_conditions(r2, need_constant=False)
    return PrivacyReport(
        mechanism=f"par({r1.mechanism}, {r2.mechanism})",
        function_class=_sum_class(r1.function_class, r2.function_class),
        divergence=r1.divergence,
        epsilon=BoundedValue(max(r1.epsilon.value, r2.epsilon.value), BoundKind.UPPER),
        output_dim=r1.output_dim + r2.output_dim,
    )


def mixture(r1: PrivacyReport, r2: PrivacyReport, lam: float) -> PrivacyReport:
    """Data-independent coin flip between two mechanisms with the same range.

    Valid for f-divergences (KL, alpha, TV) but not for Renyi, whose
    conversion breaks convexity. The reported parameter is
    max(eps1, eps2), a single sound value independent of the coin bias.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("mixture weight must lie in [0, 1]")
    if r1.divergence != r2.divergence:
        raise CompositionError("mixture operands must use the same divergence")
    if r1.divergence.kind == "renyi":
        raise CompositionError(
            "mixtures do not preserve Renyi parameters (the Renyi divergence is not "
            "convex in the pair of distributions); use KL, alpha, or TV"
        )
    if r1.function_class != r2.function_class:
        raise CompositionError("mixture operands must share the adversary class")
    if r1.output_dim != r2.output_dim:
        raise CompositionError(
            "mixture operands must share the same output range "
            f"(got dimensions {r1.output_dim} and {r2.output_dim})"
        )
    return PrivacyReport(
        mechanism=f"mix[{lam:g}]({r1.mechanism}, {r2.mechanism})",
        function_class=r1.function_class,
        divergence=r1.divergence,
        epsilon=BoundedValue(max(r1.epsilon.value, r2.epsilon.value), BoundKind.UPPER),
        output_dim=r1.output_dim,
    )


def _base(cls):
    return cls if isinstance(cls, FunctionClass) else None


def _has_closure_witness(map_description: str, target: FunctionClass, source) -> bool:
    """Whether target-after-map provably lands inside the source class."""
    if map_description == "identity":
        return target == source
    src = _base(source)
    if src is None:
        return False
    if map_description == "linear":
        if target.kind == "linear" and src.kind == "linear":
            return True
        if target.kind == "poly" and src.kind == "poly" and target.degree <= src.degree:
            return True
    return False


def post_process(r: PrivacyReport, map_description: str, target_class: FunctionClass,
                 output_dim: int | None = None) -> PrivacyReport:
    """Post-processing: applying a data-independent map preserves the parameter.

    Requires a closure witness: every target-class attack composed with
    the map must land inside the source report's class. Built-in
    witnesses: the identity map for any class, linear maps for linear ->
    linear and poly(k) -> poly(k). The result carries the target class
    and the unchanged parameter.
    """
    if not _has_closure_witness(map_description, target_class, r.function_class):
        raise CompositionError(
            f"no closure witness for map {map_description!r} from class "
            f"{_describe(r.function_class)} to {target_class.describe()}"
        )
    return PrivacyReport(
        mechanism=f"post[{map_description}]({r.mechanism})",
        function_class=target_class,
        divergence=r.divergence,
        epsilon=r.epsilon,
        output_dim=r.output_dim if output_dim is None else output_dim,
    )
