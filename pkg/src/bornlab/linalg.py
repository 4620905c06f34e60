"""Dense complex linear algebra at small dimension.

Hermitian eigendecomposition by cyclic Jacobi rotations, Haar-distributed
unitary sampling, and orthonormal basis completion.  Everything is plain
double precision: the effects the experiments must detect are >= 0.01,
far above rounding noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tolerances import TOL


class NonConvergence(RuntimeError):
    """Jacobi sweeps did not push the off-diagonal norm below threshold."""


class ZeroVector(ValueError):
    """A vector with (numerically) zero norm cannot be normalized."""


@dataclass(frozen=True)
class ComplexMatrix:
    """A square complex matrix with its entries frozen after construction."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=np.complex128)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {entries.shape}")
        if entries.shape[0] < 1:
            raise ValueError("matrix dimension must be positive")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class HermitianMatrix(ComplexMatrix):
    def __post_init__(self) -> None:
        super().__post_init__()
        if self.dim < 2:
            raise ValueError("Hermitian operators need dimension >= 2")
        defect = np.max(np.abs(self.entries - self.entries.conj().T))
        if defect > TOL.hermitian_entry:
            raise ValueError(f"matrix is not Hermitian: max |M - M^dag| = {defect:.3e}")


@dataclass(frozen=True)
class UnitaryMatrix(ComplexMatrix):
    def __post_init__(self) -> None:
        super().__post_init__()
        gram = self.entries.conj().T @ self.entries
        defect = np.max(np.abs(gram - np.eye(self.dim)))
        if defect > TOL.unitary_entry:
            raise ValueError(f"matrix is not unitary: max |U^dag U - I| = {defect:.3e}")


@dataclass(frozen=True)
class Eigensystem:
    """Ascending eigenvalues and the matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.eigenvalues, dtype=np.float64)
        vectors = np.array(self.eigenvectors, dtype=np.complex128)
        d = values.shape[0]
        if values.ndim != 1 or vectors.shape != (d, d):
            raise ValueError("eigenvalues and eigenvector columns do not match")
        if np.any(np.diff(values) < 0):
            raise ValueError("eigenvalues must be sorted ascending")
        gram = vectors.conj().T @ vectors
        defect = np.max(np.abs(gram - np.eye(d)))
        if defect > TOL.orthonormality:
            raise ValueError(f"eigenvectors are not orthonormal: defect {defect:.3e}")
        values.setflags(write=False)
        vectors.setflags(write=False)
        object.__setattr__(self, "eigenvalues", values)
        object.__setattr__(self, "eigenvectors", vectors)

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


def fix_column_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column's global phase so its largest entry is real positive.

    Ties in magnitude resolve to the lowest index, which keeps the output a
    deterministic function of the input.
    """
    out = np.array(vectors, dtype=np.complex128)
    magnitudes = np.abs(out)
    pivot_rows = np.argmax(magnitudes, axis=0)  # first max per column
    pivots = out[pivot_rows, np.arange(out.shape[1])]
    mags = np.abs(pivots)
    safe = np.where(mags > 0.0, mags, 1.0)
    out *= np.where(mags > 0.0, pivots.conj() / safe, 1.0)
    return out


def off_diagonal_norm(matrix: np.ndarray) -> float:
    """Frobenius norm of the off-diagonal part."""
    off = matrix - np.diag(np.diag(matrix))
    return float(np.linalg.norm(off))


def eigendecompose(matrix: HermitianMatrix | np.ndarray) -> Eigensystem:
    """Diagonalize a Hermitian matrix with cyclic Jacobi rotations.

    Sweeps run in a fixed (p, q) order, so the result is a deterministic
    function of the input.  Raises NonConvergence if the off-diagonal norm
    does not fall below the threshold within the sweep cap, which signals
    pathological input rather than an algorithmic failure at these sizes.
    """
    if not isinstance(matrix, HermitianMatrix):
        matrix = HermitianMatrix(matrix)
    d = matrix.dim
    a = np.array(matrix.entries)
    v = np.eye(d, dtype=np.complex128)

    for _ in range(TOL.jacobi_max_sweeps):
        if off_diagonal_norm(a) < TOL.jacobi_off_norm:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                _rotate(a, v, p, q)
    if off_diagonal_norm(a) >= TOL.jacobi_off_norm:
        raise NonConvergence(
            f"off-diagonal norm {off_diagonal_norm(a):.3e} after "
            f"{TOL.jacobi_max_sweeps} sweeps"
        )

    values = np.real(np.diag(a))
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = fix_column_phases(v[:, order])

    residual = np.max(
        np.linalg.norm(matrix.entries @ vectors - vectors * values, axis=0)
    )
    if residual > TOL.eigen_residual:
        raise NonConvergence(f"eigenpair residual {residual:.3e} above tolerance")
    return Eigensystem(values, vectors)


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Zero a[p, q] (and a[q, p]) with a complex Jacobi rotation, in place."""
    apq = a[p, q]
    r = abs(apq)
    if r == 0.0:
        return
    phase = apq / r
    tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
    t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0.0 else 1.0
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c

    # column update: A <- A J with J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = c * col_p - s * np.conj(phase) * col_q
    a[:, q] = s * col_p + c * np.conj(phase) * col_q
    # row update: A <- J^dag A
    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c * row_p - s * phase * row_q
    a[q, :] = s * row_p + c * phase * row_q

    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real

    vec_p = v[:, p].copy()
    vec_q = v[:, q].copy()
    v[:, p] = c * vec_p - s * np.conj(phase) * vec_q
    v[:, q] = s * vec_p + c * np.conj(phase) * vec_q


def haar_array(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Raw Haar-distributed unitary as an ndarray (dim >= 1)."""
    if dim < 1:
        raise ValueError("dimension must be at least 1")
    while True:
        ginibre = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        try:
            q, r = np.linalg.qr(ginibre)
        except np.linalg.LinAlgError:  # pragma: no cover - probability zero
            continue
        diag = np.diag(r)
        if np.any(np.abs(diag) == 0.0):  # pragma: no cover - probability zero
            continue
        # phase correction makes the distribution exactly Haar, not just unitary
        return q * (diag / np.abs(diag))


def haar_unitary(dim: int, rng: np.random.Generator) -> UnitaryMatrix:
    """Draw a Haar-distributed unitary (Ginibre + QR with phase correction)."""
    return UnitaryMatrix(haar_array(dim, rng))


def complete_basis(vector: np.ndarray) -> UnitaryMatrix:
    """Extend a vector to an orthonormal basis with itself as column zero.

    Remaining columns come from Gram-Schmidt against the canonical vectors,
    skipping candidates whose residual is nearly parallel to the span built
    so far.  A second orthogonalization pass keeps the result unitary even
    when a candidate barely clears the skip threshold.
    """
    v = np.asarray(vector, dtype=np.complex128).reshape(-1)
    d = v.shape[0]
    norm = np.linalg.norm(v)
    if norm <= TOL.zero_vector:
        raise ZeroVector("cannot complete a basis from a zero vector")

    columns = [v / norm]
    for i in range(d):
        if len(columns) == d:
            break
        candidate = np.zeros(d, dtype=np.complex128)
        candidate[i] = 1.0
        for col in columns:
            candidate -= col * np.vdot(col, candidate)
        residual = np.linalg.norm(candidate)
        if residual <= TOL.parallel_skip:
            continue
        candidate /= residual
        for col in columns:  # second pass: twice is enough
            candidate -= col * np.vdot(col, candidate)
        columns.append(candidate / np.linalg.norm(candidate))
    if len(columns) != d:  # pragma: no cover - cannot happen for d candidates
        raise ZeroVector("basis completion ran out of candidate directions")
    return UnitaryMatrix(np.column_stack(columns))
