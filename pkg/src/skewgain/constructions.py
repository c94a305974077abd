"""Explicit channels under which the skew information grows.

Every generator here follows one mechanism: start from the uniform
superposition |psi>, build a cyclic family of structurally incoherent Kraus
operators whose every branch maps |psi> to the same pure state |phi> with
weight 1/d, and place the amplitudes of |phi> so the variance of the
observable goes up.  The amplitude placement rule is

    sqrt(3/2d) -> index of the smallest eigenvalue,
    sqrt(1/2d) -> index of the second smallest,
    sqrt(1/d)  -> every other index,

which for d = 3 specializes to 1/sqrt(2), 1/sqrt(6) and 1/sqrt(3).
Closed-form expressions for the coherence gain are provided next to each
generator and are cross-checked against direct matrix computation in tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import (
    KrausChannel,
    apply_channel,
    channel_to_dict,
    is_incoherent_channel,
    validate_completeness,
)
from .errors import DimensionMismatch, NotSorted, NumericalInstability, StateValidation
from .measures import (
    DensityMatrix,
    DiagonalObservable,
    PureState,
    l1_coherence,
    relative_entropy_coherence,
    skew_information,
    skew_information_pure,
)
from .numerics import DEFAULT_TOL, ToleranceConfig
from .serialize import vector_to_pairs

CONSTRUCTION_TAGS = (
    "intro",
    "case_i",
    "case_ii",
    "case_perm",
    "general_d",
    "general_placement",
    "search",
)


@dataclass(frozen=True, eq=False)
class CounterexampleInstance:
    """A certified monotonicity violation: channel, states, and the gain."""

    observable: DiagonalObservable
    input_state: PureState
    channel: KrausChannel
    output_state: DensityMatrix
    delta: float  # C(output) - C(input) for the reporting measure
    tag: str


def cyclic_kraus_family(amplitudes) -> list[np.ndarray]:
    """d operators where operator i carries amplitudes[s] at row s, column (s+i) mod d.

    Operator 0 is diagonal; the others shift the column index cyclically, so
    across the family every column receives every amplitude exactly once and
    sum_i A_i^dag A_i = I whenever sum_s |amplitudes[s]|^2 = 1.  Each column
    of each operator holds at most one entry, so the family is structurally
    incoherent by construction.
    """
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    d = amps.size
    ops = []
    for i in range(d):
        a = np.zeros((d, d), dtype=complex)
        for s in range(d):
            a[s, (s + i) % d] = amps[s]
        ops.append(a)
    return ops


def placement_amplitudes(lambdas) -> np.ndarray:
    """Amplitude vector of |phi| for a given eigenvalue layout (ties by index)."""
    lam = np.asarray(lambdas, dtype=float)
    d = lam.size
    if d < 3:
        raise DimensionMismatch("the construction needs dim >= 3")
    order = np.argsort(lam, kind="stable")
    amps = np.full(d, np.sqrt(1.0 / d))
    amps[order[0]] = np.sqrt(3.0 / (2.0 * d))
    amps[order[1]] = np.sqrt(1.0 / (2.0 * d))
    return amps


def _assemble(
    observable: DiagonalObservable,
    kraus_ops,
    tag: str,
    tol: ToleranceConfig,
) -> CounterexampleInstance:
    psi = PureState.uniform(observable.dim)
    channel = validate_completeness(kraus_ops, tol=tol)
    if not is_incoherent_channel(channel):
        raise StateValidation(f"constructed channel for tag={tag!r} is not incoherent")
    output = apply_channel(channel, psi.density(tol), tol=tol)
    delta = skew_information(output, observable, tol=tol) - skew_information_pure(psi, observable)
    return CounterexampleInstance(
        observable=observable,
        input_state=psi,
        channel=channel,
        output_state=output,
        delta=delta,
        tag=tag,
    )


def construct_intro_example(tol: ToleranceConfig = DEFAULT_TOL) -> CounterexampleInstance:
    """The fixed three-level example: K = diag(1, 10, 5), amplitudes (1/sqrt2, 1/sqrt2, 0).

    Its gain is 81/4 - 122/9 = 241/36.
    """
    observable = DiagonalObservable.from_lambdas([1.0, 10.0, 5.0], tol=tol)
    amps = np.array([1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0), 0.0])
    return _assemble(observable, cyclic_kraus_family(amps), "intro", tol)


def _ordering(lambdas) -> tuple[int, ...]:
    return tuple(int(i) for i in np.argsort(np.asarray(lambdas, dtype=float), kind="stable"))


def construct_case(
    observable: DiagonalObservable, tol: ToleranceConfig = DEFAULT_TOL
) -> CounterexampleInstance:
    """Three-level construction for an arbitrary nondegenerate diagonal observable.

    The amplitude placement covers all six eigenvalue orderings; the tag
    records which one applied (case_i: l1 < l3 < l2, case_ii: l2 < l3 < l1,
    case_perm: the rest).
    """
    if observable.dim != 3:
        raise DimensionMismatch("construct_case is the dim-3 construction")
    order = _ordering(observable.lambdas)
    tag = {(0, 2, 1): "case_i", (1, 2, 0): "case_ii"}.get(order, "case_perm")
    amps = placement_amplitudes(observable.lambdas)
    return _assemble(observable, cyclic_kraus_family(amps), tag, tol)


def delta_closed_form(lambdas, ordering: tuple[int, int, int] | None = None) -> float:
    """Closed-form coherence gain of the three-level construction.

    With (i, j, k) the positions of the smallest, middle and largest
    eigenvalue, the gain is (l_j - l_i)(4 l_k - 3 l_j - l_i) / 36.  For
    ordering (0, 2, 1) this is (l3-l1)(3 l2 - 3 l3 + l2 - l1)/36, and for
    (1, 2, 0) it is (l3-l2)(3 l1 - 3 l3 + l1 - l2)/36.  Pass `ordering`
    explicitly to evaluate the formula off its validity domain (unit tests
    of the vanishing factors); by default it is inferred by sorting.
    """
    lam = np.asarray(lambdas, dtype=float).reshape(-1)
    if lam.size != 3:
        raise DimensionMismatch("closed form is specific to dim 3")
    if ordering is None:
        ordering = _ordering(lam)  # type: ignore[assignment]
    i, j, k = ordering
    return float((lam[j] - lam[i]) * (4.0 * lam[k] - 3.0 * lam[j] - lam[i])) / 36.0


def construct_general_d(
    observable: DiagonalObservable, tol: ToleranceConfig = DEFAULT_TOL
) -> CounterexampleInstance:
    """Dimension-d construction for strictly ascending eigenvalues.

    Amplitudes (sqrt(3/2d), sqrt(1/2d), sqrt(1/d), ..., sqrt(1/d)) ride the
    cyclic family; the caller sorts the observable first (see
    construct_general_placement for arbitrary order).
    """
    lam = observable.lambdas
    if observable.dim < 3:
        raise DimensionMismatch("the construction needs dim >= 3")
    if np.any(np.diff(lam) <= 0):
        raise NotSorted("eigenvalues must be strictly ascending")
    amps = placement_amplitudes(lam)
    return _assemble(observable, cyclic_kraus_family(amps), "general_d", tol)


def delta_general_d(lambdas) -> float:
    """Closed-form gain for the ascending dimension-d construction.

    (l2 - l1) [4 sum_{i>=3} l_i - (2d-5) l1 - (2d-3) l2] / (4 d^2); positive
    for strictly ascending eigenvalues, vanishing as l2 -> l1.  Products are
    taken before the 4 d^2 division to limit cancellation.
    """
    lam = np.asarray(lambdas, dtype=float).reshape(-1)
    d = lam.size
    if d < 3:
        raise DimensionMismatch("the closed form needs dim >= 3")
    if np.any(np.diff(lam) < 0):
        raise NotSorted("eigenvalues must be ascending")
    bracket = 4.0 * float(lam[2:].sum()) - (2 * d - 5) * lam[0] - (2 * d - 3) * lam[1]
    return float((lam[1] - lam[0]) * bracket) / (4.0 * d * d)


def sorting_permutation(lambdas) -> np.ndarray:
    """Permutation matrix P with P e_s = e_{order[s]}, order sorting the eigenvalues."""
    lam = np.asarray(lambdas, dtype=float)
    order = np.argsort(lam, kind="stable")
    p = np.zeros((lam.size, lam.size))
    p[order, np.arange(lam.size)] = 1.0
    return p


def construct_general_placement(
    observable: DiagonalObservable, tol: ToleranceConfig = DEFAULT_TOL
) -> CounterexampleInstance:
    """Dimension-d construction for eigenvalues in arbitrary order.

    Conjugates the ascending cyclic family by the permutation that sorts the
    eigenvalues.  Conjugation keeps each Kraus column single-entry (hence
    incoherent), leaves the uniform input invariant, and lands the large
    amplitudes on the indices of the two smallest eigenvalues, so the gain
    equals delta_general_d of the sorted eigenvalues.
    """
    lam = observable.lambdas
    if observable.dim < 3:
        raise DimensionMismatch("the construction needs dim >= 3")
    p = sorting_permutation(lam)
    sorted_amps = placement_amplitudes(np.sort(lam, kind="stable"))
    ops = [p @ b @ p.T for b in cyclic_kraus_family(sorted_amps)]
    return _assemble(observable, ops, "general_placement", tol)


def _coherence_pair(
    inst: CounterexampleInstance, rho_out: DensityMatrix, measure: str, tol: ToleranceConfig
) -> tuple[float, float]:
    if measure == "skew":
        return (
            skew_information_pure(inst.input_state, inst.observable),
            skew_information(rho_out, inst.observable, tol=tol),
        )
    if measure == "l1":
        return l1_coherence(inst.input_state.density(tol)), l1_coherence(rho_out)
    if measure == "relent":
        return (
            relative_entropy_coherence(inst.input_state.density(tol), tol=tol),
            relative_entropy_coherence(rho_out, tol=tol),
        )
    raise ValueError(f"unknown measure {measure!r}")


def validate_instance(
    inst: CounterexampleInstance,
    tol: ToleranceConfig = DEFAULT_TOL,
    measure: str = "skew",
) -> None:
    """Recompute everything about an instance from scratch; raise on mismatch.

    Checks the channel is verified incoherent, re-applies it to the input,
    compares against the stored output, and recomputes the gain with fresh
    eigendecompositions.
    """
    if inst.channel.incoherent_verified is not True:
        raise StateValidation("instance channel is not verified incoherent")
    fresh_out = apply_channel(inst.channel, inst.input_state.density(tol), tol=tol)
    drift = float(np.linalg.norm(fresh_out.matrix - inst.output_state.matrix))
    if drift > tol.reconstruction:
        raise StateValidation(f"stored output drifts from channel application by {drift:.3e}")
    c_in, c_out = _coherence_pair(inst, fresh_out, measure, tol)
    if abs((c_out - c_in) - inst.delta) > 1e-9:
        raise NumericalInstability(
            f"stored delta {inst.delta!r} disagrees with recomputation {c_out - c_in!r}"
        )


def instance_to_dict(
    inst: CounterexampleInstance, measure: str = "skew", tol: ToleranceConfig = DEFAULT_TOL
) -> dict:
    """Wire format with the gain split into its two coherence values."""
    c_in, _ = _coherence_pair(inst, inst.output_state, measure, tol)
    return {
        "tag": inst.tag,
        "dim": inst.observable.dim,
        "lambdas": [float(x) for x in inst.observable.lambdas],
        "input": vector_to_pairs(inst.input_state.amplitudes),
        "kraus": channel_to_dict(inst.channel),
        "delta": float(inst.delta),
        "c_in": float(c_in),
        "c_out": float(c_in + inst.delta),
    }
