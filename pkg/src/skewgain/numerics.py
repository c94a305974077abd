"""Dense complex-matrix primitives.

Matrices are plain ``numpy.ndarray`` values of dtype complex128; nothing in
this module mutates its inputs.  Dimensions are expected to stay desk-sized
(d <= 64), so everything is dense and eigendecomposition-based.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotPositiveSemidefinite


@dataclass(frozen=True)
class ToleranceConfig:
    """Single knob for the absolute-relative hybrid tolerances.

    ``validation`` guards input checks (hermiticity, trace, completeness,
    nondegeneracy); ``reconstruction`` guards derived-quantity checks such as
    the square-root residual.  Comparisons use ``tol * max(1, scale)`` so
    small-norm matrices keep an absolute floor.
    """

    validation: float = 1e-9
    reconstruction: float = 1e-8

    @classmethod
    def from_value(cls, value: float) -> "ToleranceConfig":
        """Derive the whole bundle from one number, keeping the default 10x ratio."""
        value = float(value)
        if value <= 0:
            raise ValueError("tolerance must be positive")
        return cls(validation=value, reconstruction=10.0 * value)

    @classmethod
    def from_env(cls, environ=None) -> "ToleranceConfig":
        """Build from the SKEWGAIN_TOL environment variable, or defaults."""
        env = os.environ if environ is None else environ
        raw = env.get("SKEWGAIN_TOL")
        if raw is None:
            return cls()
        return cls.from_value(float(raw))


DEFAULT_TOL = ToleranceConfig()


def hybrid(tol: float, scale: float) -> float:
    """Hybrid absolute/relative threshold: tol * max(1, scale)."""
    return tol * max(1.0, float(scale))


class HermitianEigenResult(NamedTuple):
    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # unitary, columns are eigenvectors


def as_square_matrix(m) -> np.ndarray:
    """Coerce to a complex square ndarray or raise DimensionMismatch."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    return a


def dagger(m) -> np.ndarray:
    """Conjugate transpose."""
    return as_square_matrix(m).conj().T


def trace(m) -> complex:
    """Trace as a complex scalar."""
    return complex(np.trace(as_square_matrix(m)))


def frobenius_norm(m) -> float:
    return float(np.linalg.norm(np.asarray(m, dtype=complex)))


def matmul(a, b) -> np.ndarray:
    a = as_square_matrix(a)
    b = as_square_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def commutator(a, b) -> np.ndarray:
    """AB - BA for equal-dimension square matrices."""
    a = as_square_matrix(a)
    b = as_square_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"commutator needs equal dims, got {a.shape} and {b.shape}")
    return a @ b - b @ a


def hermiticity_deficit(m) -> float:
    m = as_square_matrix(m)
    return float(np.linalg.norm(m - m.conj().T))


def is_hermitian(m, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    m = as_square_matrix(m)
    return hermiticity_deficit(m) <= hybrid(tol.validation, frobenius_norm(m))


def hermitian_eigh(m, tol: ToleranceConfig = DEFAULT_TOL) -> HermitianEigenResult:
    """Eigendecomposition of a Hermitian matrix.

    Returns eigenvalues in ascending order and the unitary matrix of column
    eigenvectors, so that ``V @ diag(w) @ V.conj().T`` reconstructs the input.

    Raises:
        NotHermitian: if the input fails the hermiticity precondition.
    """
    m = as_square_matrix(m)
    deficit = hermiticity_deficit(m)
    if deficit > hybrid(tol.validation, frobenius_norm(m)):
        raise NotHermitian(f"hermiticity deficit {deficit:.3e} exceeds tolerance")
    w, v = np.linalg.eigh(m)
    return HermitianEigenResult(eigenvalues=w, eigenvectors=v)


def psd_sqrt(m, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in [-tol.validation, 0) are treated as rounding noise and
    clamped to zero before the square root; anything more negative raises.

    Raises:
        NotHermitian: non-Hermitian input.
        NotPositiveSemidefinite: eigenvalue below the negativity floor.
    """
    w, v = hermitian_eigh(m, tol=tol)
    if w[0] < -tol.validation:
        raise NotPositiveSemidefinite(f"eigenvalue {w[0]:.3e} below -{tol.validation:.1e}")
    w = np.clip(w, 0.0, None)
    # sqrt has infinite slope at zero: an eigenvalue at the solver's noise
    # floor (~eps) would blow up into a sqrt(eps)-sized artifact, so values
    # indistinguishable from zero are truncated to exact zeros first
    noise_floor = w.size * np.finfo(float).eps * max(1.0, float(w[-1]))
    w[w < noise_floor] = 0.0
    s = (v * np.sqrt(w)) @ v.conj().T
    # symmetrize away rounding asymmetry so downstream hermiticity checks are free
    return 0.5 * (s + s.conj().T)
