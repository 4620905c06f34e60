"""Candidate probability rules over measurement moduli, and the
normalization-defect scan that falsifies every non-quadratic one.

The family is deliberately small and closed so that reports can name rules
reproducibly: the quadratic rule, pure powers, the quadratic-affine family,
and renormalized wrappers.  Renormalized rules sum to one by construction
and therefore evade the defect scan; they are falsified by the invariance
scans instead.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .quantum import ModulusVector, haar_state, moduli
from .streams import substream
from .tolerances import TOL


class DomainError(ValueError):
    """Rule evaluated outside the unit interval."""


@dataclass(frozen=True)
class Born:
    """The quadratic rule: f(a) = a^2."""

    def __call__(self, a):
        return np.square(a)

    @property
    def name(self) -> str:
        return "born"


@dataclass(frozen=True)
class Power:
    """Pure power rule f(a) = a^p with exponent p > 0."""

    exponent: float

    def __post_init__(self) -> None:
        if not self.exponent > 0:
            raise ValueError("power rules need a positive exponent")

    def __call__(self, a):
        return np.power(a, self.exponent)

    @property
    def name(self) -> str:
        return f"power:{self.exponent!r}"


@dataclass(frozen=True)
class Affine:
    """Quadratic-affine rule f(a) = scale * a^2 + offset."""

    scale: float
    offset: float

    def __call__(self, a):
        return self.scale * np.square(a) + self.offset

    @property
    def name(self) -> str:
        return f"affine:{self.scale!r}:{self.offset!r}"


PlainRule = Union[Born, Power, Affine]


@dataclass(frozen=True)
class Renormalized:
    """p_k = f(a_k) / sum_i f(a_i): normalized by construction."""

    base: PlainRule

    def __post_init__(self) -> None:
        if isinstance(self.base, Renormalized):
            raise ValueError("renormalized rules cannot be nested")

    @property
    def name(self) -> str:
        return f"renorm:{self.base.name}"

    def probabilities(self, values: np.ndarray) -> np.ndarray:
        raw = self.base(values)
        total = float(np.sum(raw))
        if total <= 0.0:
            raise DomainError("renormalization sum is not positive")
        return raw / total


ProbabilityRule = Union[PlainRule, Renormalized]


def parse_rule(name: str) -> ProbabilityRule:
    """Parse "born", "power:<p>", "affine:<scale>:<offset>", "renorm:<base>"."""
    text = name.strip().lower()
    if text == "born":
        return Born()
    if text.startswith("renorm:"):
        return Renormalized(parse_rule(text[len("renorm:") :]))
    try:
        if text.startswith("power:"):
            return Power(float(text[len("power:") :]))
        if text.startswith("affine:"):
            _, scale, offset = text.split(":")
            return Affine(float(scale), float(offset))
    except (ValueError, TypeError) as exc:
        raise ValueError(f"malformed rule name {name!r}") from exc
    raise ValueError(f"unknown rule name {name!r}")


def evaluate(rule: ProbabilityRule, a: float) -> float:
    """Evaluate a plain rule at one modulus in [0, 1] (tiny slack allowed)."""
    if isinstance(rule, Renormalized):
        raise TypeError("renormalized rules are evaluated on full modulus vectors")
    if not -TOL.domain_slack <= a <= 1.0 + TOL.domain_slack:
        raise DomainError(f"modulus {a!r} outside [0, 1]")
    return float(rule(min(max(a, 0.0), 1.0)))


def rule_probabilities(rule: ProbabilityRule, point: ModulusVector) -> np.ndarray:
    """Apply a rule to every modulus of an orthant point.

    Plain rules are applied entrywise with no renormalization; whether the
    result sums to one is exactly what the defect scan measures.
    """
    if isinstance(rule, Renormalized):
        return rule.probabilities(point.moduli)
    return np.asarray(rule(point.moduli), dtype=np.float64)


def outcome_function(rule: ProbabilityRule, k: int) -> Callable[[np.ndarray], float]:
    """The probability of outcome k as a function of a raw modulus array."""
    if isinstance(rule, Renormalized):
        base = rule.base
        return lambda values: float(base(values[k]) / np.sum(base(values)))
    return lambda values: float(rule(values[k]))


def normalization_sum(rule: ProbabilityRule, point: ModulusVector) -> float:
    """Sum of the rule over all moduli; identically 1 for renormalized rules."""
    if isinstance(rule, Renormalized):
        return 1.0
    return float(np.sum(rule(point.moduli)))


@dataclass(frozen=True)
class NormalizationReport:
    """Defect statistics |sum_i f(a_i) - 1| over Haar-random states."""

    rule: str
    dim: int
    trials: int
    max_defect: float
    mean_defect: float
    argmax_state: ModulusVector
    seed: int
    defects: np.ndarray

    def __post_init__(self) -> None:
        defects = np.array(self.defects, dtype=np.float64)
        defects.setflags(write=False)
        object.__setattr__(self, "defects", defects)

    def as_dict(self) -> dict:
        return {
            "rule": self.rule,
            "dim": self.dim,
            "trials": self.trials,
            "max_defect": self.max_defect,
            "mean_defect": self.mean_defect,
            "argmax_state": [float(x) for x in self.argmax_state.moduli],
            "seed": self.seed,
        }


def defect_scan(
    rule: ProbabilityRule, dim: int, trials: int, seed: int, threads: int = 1
) -> NormalizationReport:
    """Measure the normalization defect over Haar-random states.

    Each trial draws its own substream from (seed, trial index), so the
    report is a deterministic function of (rule, dim, trials, seed) for any
    thread count.  The worst state is recorded as a falsification witness.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    defects = np.empty(trials, dtype=np.float64)
    points: list[ModulusVector | None] = [None] * trials

    def run(i: int) -> None:
        point = moduli(haar_state(dim, substream(seed, i)).amplitudes)
        points[i] = point
        defects[i] = abs(normalization_sum(rule, point) - 1.0)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, range(trials)))
    else:
        for i in range(trials):
            run(i)

    worst = int(np.argmax(defects))  # first max index: deterministic
    return NormalizationReport(
        rule=rule.name,
        dim=dim,
        trials=trials,
        max_defect=float(defects[worst]),
        mean_defect=float(np.mean(defects)),
        argmax_state=points[worst],
        seed=seed,
        defects=defects,
    )
