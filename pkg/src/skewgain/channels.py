"""Kraus channels: completeness validation, the incoherence criterion, application.

A channel {A_n} is incoherent when every branch maps diagonal states to
(normalized) diagonal states.  By linearity it is enough that A |i><i| A^dag
is diagonal for every basis state, which holds exactly when each column of A
is supported on a single row.  That structural test is the production path;
a sampling oracle applying the definition directly is kept as an independent
cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, IncompleteKrausSet, StateValidation
from .measures import DensityMatrix, PureState
from .numerics import DEFAULT_TOL, ToleranceConfig, as_square_matrix, frobenius_norm
from .serialize import matrix_to_pairs, pairs_to_matrix

# Entries with modulus <= INCOHERENCE_EPS * ||A||_F count as structural zeros.
INCOHERENCE_EPS = 1e-12


@dataclass(eq=False)
class KrausChannel:
    """Complete set of Kraus operators on a d-dimensional space.

    incoherent_verified is a tri-state: True / False once checked, None while
    unchecked.  It is written once by is_incoherent_channel and never mutated
    afterwards.
    """

    dim: int
    kraus_ops: tuple[np.ndarray, ...]
    incoherent_verified: Optional[bool] = None

    @property
    def branches(self) -> int:
        return len(self.kraus_ops)


def completeness_deficit(ops: Sequence[np.ndarray]) -> float:
    """Frobenius norm of sum_n A_n^dag A_n - I."""
    if not ops:
        raise DimensionMismatch("need at least one Kraus operator")
    mats = [as_square_matrix(a) for a in ops]
    dim = mats[0].shape[0]
    for a in mats:
        if a.shape[0] != dim:
            raise DimensionMismatch("Kraus operators must share one dimension")
    gram = sum(a.conj().T @ a for a in mats)
    return float(np.linalg.norm(gram - np.eye(dim)))


def validate_completeness(
    ops: Sequence[np.ndarray], tol: ToleranceConfig = DEFAULT_TOL
) -> KrausChannel:
    """Build a channel after checking sum_n A_n^dag A_n = I.

    Raises IncompleteKrausSet (carrying the deficit) when the sum misses the
    identity by more than tol.validation * sqrt(d).
    """
    mats = tuple(as_square_matrix(a).copy() for a in ops)
    deficit = completeness_deficit(mats)
    dim = mats[0].shape[0]
    if deficit > tol.validation * np.sqrt(dim):
        raise IncompleteKrausSet(
            f"Kraus set misses the identity by {deficit:.3e}", deficit=deficit
        )
    for a in mats:
        a.setflags(write=False)
    return KrausChannel(dim=dim, kraus_ops=mats, incoherent_verified=None)


def is_incoherent_kraus(op) -> bool:
    """Structural incoherence of one operator: at most one nonzero per column."""
    a = as_square_matrix(op)
    threshold = INCOHERENCE_EPS * frobenius_norm(a)
    return bool(np.all((np.abs(a) > threshold).sum(axis=0) <= 1))


def is_incoherent_channel(channel: KrausChannel) -> bool:
    """Check every branch; records the verdict on the channel."""
    verdict = all(is_incoherent_kraus(a) for a in channel.kraus_ops)
    channel.incoherent_verified = verdict
    return verdict


def _oracle_ops(
    ops: Sequence[np.ndarray], dim: int, trials: int, rng: np.random.Generator, tol: ToleranceConfig
) -> bool:
    # the definition, applied by sampling: every branch on every diagonal
    # state must give a (normalized) diagonal output
    probe_diags = [np.eye(dim)[i] for i in range(dim)]
    probe_diags += [rng.dirichlet(np.ones(dim)) for _ in range(trials)]
    for p in probe_diags:
        rho = np.diag(p).astype(complex)
        for a in ops:
            out = a @ rho @ a.conj().T
            weight = np.trace(out).real
            if weight < 1e-12:
                continue  # unrealized branch: the normalized output is undefined
            normalized = out / weight
            off = normalized - np.diag(np.diag(normalized))
            if np.linalg.norm(off) > tol.validation:
                return False
    return True


def incoherence_oracle(
    channel: KrausChannel,
    trials: int = 100,
    seed: int = 0,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> bool:
    """Brute-force incoherence check, independent of the structural test.

    Samples `trials` random diagonal states plus all basis states and applies
    each branch individually.
    """
    rng = np.random.default_rng(seed)
    return _oracle_ops(channel.kraus_ops, channel.dim, trials, rng, tol)


def apply_channel(
    channel: KrausChannel, rho: DensityMatrix, tol: ToleranceConfig = DEFAULT_TOL
) -> DensityMatrix:
    """sum_n A_n rho A_n^dag, revalidated as a density matrix."""
    if channel.dim != rho.dim:
        raise DimensionMismatch(f"channel dim {channel.dim} != state dim {rho.dim}")
    out = sum(a @ rho.matrix @ a.conj().T for a in channel.kraus_ops)
    try:
        return DensityMatrix.from_matrix(out, tol=tol)
    except StateValidation as exc:
        raise StateValidation(f"channel output failed validation: {exc}") from exc


def apply_kraus_to_pure(op, psi: PureState) -> tuple[np.ndarray, float]:
    """One branch on a pure state: (unnormalized A|psi>, squared norm).

    The weight is the probability of the branch; dividing the amplitudes by
    its square root gives the post-selected state.
    """
    a = as_square_matrix(op)
    if a.shape[0] != psi.dim:
        raise DimensionMismatch(f"operator dim {a.shape[0]} != state dim {psi.dim}")
    out = a @ psi.amplitudes
    weight = float(np.sum(out.real**2 + out.imag**2))
    return out, weight


def compose(
    outer: KrausChannel, inner: KrausChannel, tol: ToleranceConfig = DEFAULT_TOL
) -> KrausChannel:
    """Channel doing `inner` first, then `outer` (Kraus products B_m A_n)."""
    if outer.dim != inner.dim:
        raise DimensionMismatch(f"cannot compose dims {outer.dim} and {inner.dim}")
    products = [b @ a for b in outer.kraus_ops for a in inner.kraus_ops]
    return validate_completeness(products, tol=tol)


def channel_to_dict(channel: KrausChannel) -> dict:
    """Wire format: {"dim": d, "kraus": [flat row-major [re, im] pairs per op]}."""
    return {
        "dim": channel.dim,
        "kraus": [matrix_to_pairs(a) for a in channel.kraus_ops],
    }


def channel_from_dict(doc: dict, tol: ToleranceConfig = DEFAULT_TOL) -> KrausChannel:
    dim = int(doc["dim"])
    ops = [pairs_to_matrix(pairs, dim) for pairs in doc["kraus"]]
    return validate_completeness(ops, tol=tol)
