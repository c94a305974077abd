"""Validated state types and coherence measures.

The basis is fixed once and for all: a state is incoherent when its density
matrix is diagonal.  The central quantity is the skew information
C(rho, K) = -1/2 Tr([sqrt(rho), K]^2) for a nondegenerate diagonal observable
K; for a pure state it reduces to the variance of K.  Two baseline measures
(l1 off-diagonal mass and relative entropy of coherence, log base 2) are kept
alongside for cross-measure comparisons in the search harness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import (
    BadEnsemble,
    DegenerateObservable,
    DimensionMismatch,
    NumericalInstability,
    StateValidation,
)
from .numerics import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_square_matrix,
    commutator,
    frobenius_norm,
    hermiticity_deficit,
    hybrid,
    psd_sqrt,
)


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace d x d state."""

    dim: int
    matrix: np.ndarray

    @classmethod
    def from_matrix(cls, matrix, tol: ToleranceConfig = DEFAULT_TOL) -> "DensityMatrix":
        """Validate and wrap a raw matrix; stores the hermitized copy.

        Raises StateValidation naming the first violated invariant.
        """
        try:
            m = as_square_matrix(matrix)
        except DimensionMismatch as exc:
            raise StateValidation(str(exc)) from exc
        scale = frobenius_norm(m)
        if hermiticity_deficit(m) > hybrid(tol.validation, scale):
            raise StateValidation("density matrix is not Hermitian within tolerance")
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m).real
        if abs(tr - 1.0) > tol.validation:
            raise StateValidation(f"trace {tr!r} is not 1 within tolerance")
        w = np.linalg.eigvalsh(m)
        if w[0] < -tol.validation:
            raise StateValidation(f"negative eigenvalue {w[0]:.3e} beyond tolerance")
        return cls(dim=m.shape[0], matrix=_frozen(m))

    @classmethod
    def from_pure(cls, psi: "PureState", tol: ToleranceConfig = DEFAULT_TOL) -> "DensityMatrix":
        return cls.from_matrix(np.outer(psi.amplitudes, psi.amplitudes.conj()), tol=tol)

    def populations(self) -> np.ndarray:
        """Diagonal of the state in the incoherent basis (real)."""
        return np.real(np.diag(self.matrix))


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector of d complex amplitudes in the fixed basis."""

    dim: int
    amplitudes: np.ndarray

    @classmethod
    def from_amplitudes(cls, amplitudes, tol: ToleranceConfig = DEFAULT_TOL) -> "PureState":
        a = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if a.size < 1:
            raise StateValidation("empty amplitude vector")
        norm_sq = float(np.sum(a.real**2 + a.imag**2))
        if abs(norm_sq - 1.0) > tol.validation:
            raise StateValidation(f"squared norm {norm_sq!r} is not 1 within tolerance")
        return cls(dim=a.size, amplitudes=_frozen(a))

    @classmethod
    def uniform(cls, dim: int) -> "PureState":
        """Equal-weight superposition (1/sqrt(d), ..., 1/sqrt(d))."""
        if dim < 1:
            raise DimensionMismatch("dim must be >= 1")
        return cls(dim=dim, amplitudes=_frozen(np.full(dim, 1.0 / np.sqrt(dim), dtype=complex)))

    def density(self, tol: ToleranceConfig = DEFAULT_TOL) -> DensityMatrix:
        return DensityMatrix.from_pure(self, tol=tol)


@dataclass(frozen=True, eq=False)
class DiagonalObservable:
    """Real diagonal observable with pairwise-distinct eigenvalues.

    Stored as the diagonal only, in original index order: position i carries
    lambdas[i] against basis vector |i>.
    """

    dim: int
    lambdas: np.ndarray

    @classmethod
    def from_lambdas(cls, lambdas, tol: ToleranceConfig = DEFAULT_TOL) -> "DiagonalObservable":
        lam = np.asarray(lambdas, dtype=float).reshape(-1)
        if lam.size < 1:
            raise DimensionMismatch("observable needs at least one eigenvalue")
        if lam.size > 1:
            gaps = np.diff(np.sort(lam))
            threshold = hybrid(tol.validation, float(np.max(np.abs(lam))))
            if float(gaps.min()) <= threshold:
                raise DegenerateObservable(
                    f"minimum eigenvalue gap {gaps.min():.3e} within degeneracy tolerance"
                )
        return cls(dim=lam.size, lambdas=_frozen(lam))

    def matrix(self) -> np.ndarray:
        return np.diag(self.lambdas).astype(complex)


def _check_dims(dim_a: int, dim_b: int, what: str) -> None:
    if dim_a != dim_b:
        raise DimensionMismatch(f"{what}: {dim_a} != {dim_b}")


def skew_information(
    rho: DensityMatrix, observable: DiagonalObservable, tol: ToleranceConfig = DEFAULT_TOL
) -> float:
    """Skew information -1/2 Tr([sqrt(rho), K]^2).

    The trace is real up to rounding; an imaginary residue beyond tolerance
    raises NumericalInstability, as does a negative value beyond the clamp
    window.  Small negatives (>= -tol.validation) are clamped to 0.
    """
    _check_dims(rho.dim, observable.dim, "state vs observable dim")
    k = observable.matrix()
    root = psd_sqrt(rho.matrix, tol=tol)
    comm = commutator(root, k)
    t = complex(np.trace(comm @ comm))
    if abs(t.imag) > tol.validation:
        raise NumericalInstability(f"imaginary trace residue {t.imag:.3e}")
    value = -0.5 * t.real
    if value < -tol.validation:
        raise NumericalInstability(f"skew information {value:.3e} below clamp window")
    return max(value, 0.0)


def skew_information_pure(psi: PureState, observable: DiagonalObservable) -> float:
    """Fast path for pure states: the variance of the observable.

    sqrt(|psi><psi|) = |psi><psi|, so the commutator trace collapses to
    <K^2> - <K>^2; no matrix algebra needed.
    """
    _check_dims(psi.dim, observable.dim, "state vs observable dim")
    p = psi.amplitudes.real**2 + psi.amplitudes.imag**2
    lam = observable.lambdas
    mean = float(p @ lam)
    return max(float(p @ (lam * lam)) - mean * mean, 0.0)


def l1_coherence(rho: DensityMatrix) -> float:
    """Sum of absolute values of the off-diagonal entries."""
    a = np.abs(rho.matrix)
    return float(a.sum() - np.trace(a))


def _entropy_bits(p: np.ndarray) -> float:
    p = np.clip(np.real(p), 0.0, None)
    nz = p[p > 0.0]
    return float(-(nz * np.log2(nz)).sum())


def relative_entropy_coherence(rho: DensityMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """S(diag(rho)) - S(rho) in bits (log base 2), with 0 log 0 = 0."""
    s_diag = _entropy_bits(np.diag(rho.matrix))
    s_full = _entropy_bits(np.linalg.eigvalsh(rho.matrix))
    value = s_diag - s_full
    if value < -tol.validation:
        raise NumericalInstability(f"relative entropy of coherence {value:.3e} negative")
    return max(value, 0.0)


MeasureFn = Callable[[DensityMatrix, Optional[DiagonalObservable]], float]


def _skew_entry(rho: DensityMatrix, observable: Optional[DiagonalObservable]) -> float:
    if observable is None:
        raise DimensionMismatch("the skew measure needs an observable")
    return skew_information(rho, observable)


MEASURES: dict[str, MeasureFn] = {
    "skew": _skew_entry,
    "l1": lambda rho, observable: l1_coherence(rho),
    "relent": lambda rho, observable: relative_entropy_coherence(rho),
}


class ConvexityCheck(NamedTuple):
    ok: bool
    slack: float  # sum_n p_n C(rho_n) - C(sum_n p_n rho_n); ok iff >= -1e-8


def check_convexity(
    measure: MeasureFn,
    ensemble: Sequence[tuple[float, DensityMatrix]],
    observable: Optional[DiagonalObservable] = None,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> ConvexityCheck:
    """Test that mixing does not increase the measure.

    Evaluates both sides of C(sum p_n rho_n) <= sum p_n C(rho_n) directly and
    returns (satisfied-within-slack, signed slack).
    """
    if not ensemble:
        raise BadEnsemble("empty ensemble")
    weights = np.array([w for w, _ in ensemble], dtype=float)
    if np.any(weights <= 0.0):
        raise BadEnsemble("weights must be positive")
    if abs(weights.sum() - 1.0) > tol.validation:
        raise BadEnsemble(f"weights sum to {weights.sum()!r}, expected 1")
    dim = ensemble[0][1].dim
    for _, rho in ensemble:
        _check_dims(rho.dim, dim, "ensemble member dim")
    if observable is not None:
        _check_dims(observable.dim, dim, "observable vs ensemble dim")
    mixed = DensityMatrix.from_matrix(
        sum(w * rho.matrix for w, rho in ensemble), tol=tol
    )
    lhs = measure(mixed, observable)
    rhs = float(sum(w * measure(rho, observable) for w, rho in ensemble))
    slack = rhs - lhs
    return ConvexityCheck(ok=slack >= -tol.reconstruction, slack=slack)
