"""States, observables, measurement bases, and measurement simulation.

A measurement expands the state in the eigenbasis of a nondegenerate
Hermitian observable, assigns outcome probabilities through a candidate
probability rule, and (for the quadratic rule) samples an outcome and
collapses onto the matching eigenvector.  Includes the spin-1 fixtures
used by the two-observable demonstration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import Eigensystem, HermitianMatrix, eigendecompose, fix_column_phases, haar_array
from .tolerances import TOL


class DimMismatch(ValueError):
    """State and observable dimensions differ."""


class NotNormalized(ValueError):
    """Input vector is not normalized within tolerance."""


@dataclass(frozen=True)
class StateVector:
    """A pure state: unit-norm complex amplitude vector."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amplitudes = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        defect = abs(np.sum(np.abs(amplitudes) ** 2) - 1.0)
        if defect > TOL.state_norm:
            raise NotNormalized(f"state norm defect {defect:.3e}")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @classmethod
    def normalize(cls, raw: np.ndarray) -> "StateVector":
        raw = np.asarray(raw, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(raw)
        if norm <= TOL.zero_vector:
            raise NotNormalized("cannot normalize a zero vector")
        return cls(raw / norm)


@dataclass(frozen=True)
class ModulusVector:
    """A point on the unit orthant: non-negative moduli with unit square sum."""

    moduli: np.ndarray

    def __post_init__(self) -> None:
        moduli = np.array(self.moduli, dtype=np.float64).reshape(-1)
        if np.any(moduli < 0.0):
            raise ValueError("moduli must be non-negative")
        defect = abs(np.sum(moduli**2) - 1.0)
        if defect > TOL.orthant_norm:
            raise NotNormalized(f"orthant norm defect {defect:.3e}")
        moduli.setflags(write=False)
        object.__setattr__(self, "moduli", moduli)

    @property
    def dim(self) -> int:
        return self.moduli.shape[0]


@dataclass(frozen=True)
class Observable:
    """Hermitian operator with a cached nondegenerate eigensystem."""

    matrix: HermitianMatrix
    eigensystem: Eigensystem
    label: str = ""

    def __post_init__(self) -> None:
        if self.matrix.dim != self.eigensystem.dim:
            raise DimMismatch("matrix and eigensystem dimensions differ")
        gaps = np.diff(self.eigensystem.eigenvalues)
        if gaps.size and np.min(gaps) <= TOL.degeneracy_gap:
            raise ValueError(
                f"degenerate spectrum: smallest gap {np.min(gaps):.3e}"
            )
        residual = np.max(
            np.linalg.norm(
                self.matrix.entries @ self.eigensystem.eigenvectors
                - self.eigensystem.eigenvectors * self.eigensystem.eigenvalues,
                axis=0,
            )
        )
        if residual > TOL.eigen_residual:
            raise ValueError(f"cached eigensystem residual {residual:.3e}")

    @property
    def dim(self) -> int:
        return self.matrix.dim

    @classmethod
    def from_matrix(cls, matrix: HermitianMatrix | np.ndarray, label: str = "") -> "Observable":
        if not isinstance(matrix, HermitianMatrix):
            matrix = HermitianMatrix(matrix)
        return cls(matrix, eigendecompose(matrix), label)

    @classmethod
    def from_eigenbasis(
        cls, eigenvalues: np.ndarray, basis: np.ndarray, label: str = ""
    ) -> "Observable":
        """Assemble an observable whose eigensystem is known by construction.

        The basis columns are the eigenvectors; they are reordered to
        ascending eigenvalue and phase-fixed, and the matrix is built as
        V diag(w) V^dag (re-Hermitized to kill rounding asymmetry).
        """
        values = np.asarray(eigenvalues, dtype=np.float64).reshape(-1)
        vectors = np.asarray(basis, dtype=np.complex128)
        order = np.argsort(values, kind="stable")
        values = values[order]
        vectors = fix_column_phases(vectors[:, order])
        raw = (vectors * values) @ vectors.conj().T
        matrix = HermitianMatrix((raw + raw.conj().T) / 2.0)
        return cls(matrix, Eigensystem(values, vectors), label)


@dataclass(frozen=True)
class MeasurementRecord:
    """One measurement outcome: index, eigenvalue, and the collapsed state."""

    outcome_index: int
    eigenvalue: float
    post_state: StateVector


def expand(state: StateVector, observable: Observable) -> np.ndarray:
    """Expansion coefficients of the state in the observable's eigenbasis."""
    if state.dim != observable.dim:
        raise DimMismatch(f"state dim {state.dim} vs observable dim {observable.dim}")
    return observable.eigensystem.eigenvectors.conj().T @ state.amplitudes


def moduli(amplitudes: np.ndarray) -> ModulusVector:
    """Entrywise absolute values of a normalized amplitude vector."""
    amplitudes = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    defect = abs(np.sum(np.abs(amplitudes) ** 2) - 1.0)
    if defect > TOL.state_norm:
        raise NotNormalized(f"amplitude norm defect {defect:.3e}")
    return ModulusVector(np.abs(amplitudes))


def probabilities(state: StateVector, observable: Observable, rule) -> np.ndarray:
    """Outcome values assigned by a probability rule.

    For plain rules this is the rule applied to each modulus; the result is
    NOT forced to sum to one — the normalization defect is the experimental
    signal.  Renormalized rules divide by their own sum.
    """
    from .rules import rule_probabilities

    return rule_probabilities(rule, moduli(expand(state, observable)))


def born_probabilities(state: StateVector, observable: Observable) -> np.ndarray:
    """Squared moduli of the expansion coefficients."""
    return np.abs(expand(state, observable)) ** 2


def _draw_outcomes(cumulative: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    # inverse CDF with ties resolved toward the lower index
    idx = np.searchsorted(cumulative, uniforms, side="left")
    return np.minimum(idx, cumulative.shape[0] - 1)


def measure(
    state: StateVector, observable: Observable, rng: np.random.Generator
) -> MeasurementRecord:
    """Sample one outcome (quadratic rule) and collapse onto its eigenvector.

    Only the quadratic rule yields a normalized distribution, so sampling
    under any other rule is rejected by construction: this function does
    not take a rule argument.
    """
    p = born_probabilities(state, observable)
    cumulative = np.cumsum(p)
    k = int(_draw_outcomes(cumulative, np.array([rng.random()]))[0])
    post = StateVector.normalize(observable.eigensystem.eigenvectors[:, k])
    return MeasurementRecord(k, float(observable.eigensystem.eigenvalues[k]), post)


def sample_outcomes(
    state: StateVector, observable: Observable, shots: int, rng: np.random.Generator
) -> np.ndarray:
    """Outcome counts over many shots, using the same draw rule as measure()."""
    p = born_probabilities(state, observable)
    cumulative = np.cumsum(p)
    idx = _draw_outcomes(cumulative, rng.random(shots))
    return np.bincount(idx, minlength=state.dim)


def haar_state(dim: int, rng: np.random.Generator) -> StateVector:
    """Uniformly random pure state (normalized complex Gaussian vector)."""
    while True:
        z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        norm = np.linalg.norm(z)
        if norm > TOL.zero_vector:
            return StateVector(z / norm)


def gapped_eigenvalues(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Distinct eigenvalues uniform on [-1, 1], resampled until the minimum
    pairwise gap clears the threshold.  Returned in draw order (unsorted)."""
    if dim == 1:
        return rng.uniform(-1.0, 1.0, size=1)
    while True:
        values = rng.uniform(-1.0, 1.0, size=dim)
        if np.min(np.diff(np.sort(values))) > TOL.random_gap:
            return values


def random_observable(dim: int, rng: np.random.Generator, label: str = "") -> Observable:
    """Observable with Haar-random eigenbasis and a gapped random spectrum."""
    return Observable.from_eigenbasis(
        gapped_eigenvalues(dim, rng), haar_array(dim, rng), label
    )


def spin1_jz() -> Observable:
    """Angular momentum along z for spin 1, in the m = 1, 0, -1 ordering."""
    return Observable.from_matrix(np.diag([1.0, 0.0, -1.0]).astype(complex), "Jz")


def spin1_jx2_minus_jy2() -> Observable:
    """The spin-1 operator Jx^2 - Jy^2, which shares the m = 0 eigenvector
    with Jz while its other eigenvectors are (|1> +/- |-1>)/sqrt(2)."""
    m = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]], dtype=complex)
    return Observable.from_matrix(m, "Jx2-Jy2")
