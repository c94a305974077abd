import json

import numpy as np
import pytest

from skewgain import (
    DensityMatrix,
    DimensionMismatch,
    IncompleteKrausSet,
    PureState,
    apply_channel,
    apply_kraus_to_pure,
    channel_from_dict,
    channel_to_dict,
    compose,
    construct_case,
    construct_general_d,
    construct_general_placement,
    construct_intro_example,
    DiagonalObservable,
    incoherence_oracle,
    is_incoherent_channel,
    is_incoherent_kraus,
    l1_coherence,
    relative_entropy_coherence,
    validate_completeness,
)
from skewgain.channels import completeness_deficit
from skewgain.search import (
    rand_density_matrix,
    rand_pure_state,
    sample_incoherent_channel,
)
from skewgain.serialize import canonical_json


def intro_ops():
    s = 1 / np.sqrt(2)
    a1 = np.zeros((3, 3), complex)
    a1[0, 0] = s
    a1[1, 1] = s
    a2 = np.zeros((3, 3), complex)
    a2[0, 1] = s
    a2[1, 2] = s
    a3 = np.zeros((3, 3), complex)
    a3[0, 2] = s
    a3[1, 0] = s
    return [a1, a2, a3]


def hadamard_channel():
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    return validate_completeness([h])


# ---------------------------------------------------------------------------
# completeness
# ---------------------------------------------------------------------------

def test_identity_is_complete():
    ch = validate_completeness([np.eye(3, dtype=complex)])
    assert ch.dim == 3
    assert ch.branches == 1
    assert ch.incoherent_verified is None


def test_intro_ops_are_complete():
    ch = validate_completeness(intro_ops())
    assert completeness_deficit(ch.kraus_ops) < 1e-12


def test_half_identity_is_incomplete():
    with pytest.raises(IncompleteKrausSet) as err:
        validate_completeness([np.eye(3, dtype=complex) / 2])
    assert err.value.deficit > 1.0


def test_mixed_dims_rejected():
    with pytest.raises(DimensionMismatch):
        validate_completeness([np.eye(2, dtype=complex), np.eye(3, dtype=complex)])


# ---------------------------------------------------------------------------
# incoherence: structural test and oracle
# ---------------------------------------------------------------------------

def test_diagonal_kraus_is_incoherent():
    assert is_incoherent_kraus(np.diag([0.3, 0.4j, 0.5]))


def test_permutation_times_diagonal_is_incoherent():
    p = np.eye(3)[[2, 0, 1]]
    assert is_incoherent_kraus(p @ np.diag([0.3, 0.4, 0.5]))


def test_two_entries_in_a_column_is_not_incoherent():
    # applying to |1><1| gives (|1>+|2>)(<1|+<2|)/2, which has off-diagonals
    a = np.zeros((3, 3), complex)
    a[0, 0] = 1.0
    a[1, 0] = 1.0
    assert not is_incoherent_kraus(a)
    rho = np.zeros((3, 3), complex)
    rho[0, 0] = 1.0
    out = a @ rho @ a.conj().T
    out /= np.trace(out).real
    assert np.abs(out - np.diag(np.diag(out))).max() > 0.4


def test_intro_channel_is_incoherent():
    ch = validate_completeness(intro_ops())
    assert is_incoherent_channel(ch)
    assert ch.incoherent_verified is True


def test_case_channel_is_incoherent():
    inst = construct_case(DiagonalObservable.from_lambdas([1.0, 10.0, 5.0]))
    assert inst.channel.incoherent_verified is True


def test_hadamard_channel_is_coherent():
    ch = hadamard_channel()
    assert not is_incoherent_channel(ch)
    assert ch.incoherent_verified is False


def test_oracle_on_intro_channel():
    ch = validate_completeness(intro_ops())
    assert incoherence_oracle(ch, trials=100)


def test_oracle_on_hadamard_channel():
    assert not incoherence_oracle(hadamard_channel(), trials=20)


def test_oracle_agrees_with_structural_check(rng):
    for i in range(200):
        dim = int(rng.integers(2, 6))
        if i % 2 == 0:
            ch = sample_incoherent_channel(rng, dim, int(rng.integers(1, dim + 2)))
        else:
            # generic channel from a random isometry: almost surely coherent
            n = int(rng.integers(1, 4))
            g = rng.standard_normal((n * dim, dim)) + 1j * rng.standard_normal((n * dim, dim))
            q, _ = np.linalg.qr(g)
            ch = validate_completeness([q[k * dim : (k + 1) * dim] for k in range(n)])
        assert incoherence_oracle(ch, trials=20, seed=i) == is_incoherent_channel(ch)


# ---------------------------------------------------------------------------
# application
# ---------------------------------------------------------------------------

def test_intro_channel_maps_uniform_to_half_half():
    ch = validate_completeness(intro_ops())
    out = apply_channel(ch, PureState.uniform(3).density())
    phi = np.array([1, 1, 0], dtype=complex) / np.sqrt(2)
    assert np.linalg.norm(out.matrix - np.outer(phi, phi.conj())) < 1e-12


def test_identity_channel_preserves_state(rng):
    ch = validate_completeness([np.eye(4, dtype=complex)])
    rho = rand_density_matrix(rng, 4)
    out = apply_channel(ch, rho)
    assert np.linalg.norm(out.matrix - rho.matrix) < 1e-12


def test_case_channel_output_state():
    inst = construct_case(DiagonalObservable.from_lambdas([1.0, 10.0, 5.0]))
    phi = np.array([1 / np.sqrt(2), 1 / np.sqrt(3), 1 / np.sqrt(6)], dtype=complex)
    assert np.linalg.norm(inst.output_state.matrix - np.outer(phi, phi.conj())) < 1e-12


def test_apply_channel_dim_mismatch():
    ch = validate_completeness([np.eye(2, dtype=complex)])
    with pytest.raises(DimensionMismatch):
        apply_channel(ch, PureState.uniform(3).density())


def test_apply_channel_revalidates_output():
    from skewgain import KrausChannel, StateValidation

    # hand-built non-trace-preserving set sneaks past construction but not application
    bad = KrausChannel(dim=2, kraus_ops=(np.eye(2, dtype=complex) / 2,))
    with pytest.raises(StateValidation):
        apply_channel(bad, PureState.uniform(2).density())


def test_empty_kraus_set_rejected():
    with pytest.raises(DimensionMismatch):
        completeness_deficit([])


def test_trace_preserved_on_random_channels(rng):
    for _ in range(50):
        dim = int(rng.integers(2, 7))
        ch = sample_incoherent_channel(rng, dim, int(rng.integers(1, dim + 2)))
        out = apply_channel(ch, rand_density_matrix(rng, dim))
        assert abs(np.trace(out.matrix).real - 1.0) <= 1e-9


def test_incoherent_channels_preserve_diagonality(rng):
    from skewgain.search import rand_diagonal_density

    for _ in range(50):
        dim = int(rng.integers(2, 7))
        ch = sample_incoherent_channel(rng, dim, int(rng.integers(1, dim + 2)))
        assert is_incoherent_channel(ch)
        out = apply_channel(ch, rand_diagonal_density(rng, dim))
        off = out.matrix - np.diag(np.diag(out.matrix))
        assert np.linalg.norm(off) <= 1e-9


# ---------------------------------------------------------------------------
# per-branch application
# ---------------------------------------------------------------------------

def test_intro_branch_two():
    ops = intro_ops()
    out, weight = apply_kraus_to_pure(ops[1], PureState.uniform(3))
    phi = np.array([1, 1, 0], dtype=complex) / np.sqrt(2)
    assert abs(weight - 1 / 3) < 1e-12
    assert np.linalg.norm(out - phi / np.sqrt(3)) < 1e-12


def test_identity_branch():
    psi = PureState.uniform(3)
    out, weight = apply_kraus_to_pure(np.eye(3, dtype=complex), psi)
    assert weight == pytest.approx(1.0)
    assert np.array_equal(out, psi.amplitudes)


def test_general_d4_branches():
    inst = construct_general_d(DiagonalObservable.from_lambdas([1.0, 2.0, 3.0, 4.0]))
    psi = PureState.uniform(4)
    phi = np.array([np.sqrt(3 / 8), np.sqrt(1 / 8), 0.5, 0.5], dtype=complex)
    for op in inst.channel.kraus_ops:
        out, weight = apply_kraus_to_pure(op, psi)
        assert abs(weight - 0.25) < 1e-12
        assert np.linalg.norm(out - phi / 2.0) < 1e-12


# ---------------------------------------------------------------------------
# baseline monotonicity under construction channels
# ---------------------------------------------------------------------------

def test_baselines_monotone_under_construction_channels(rng):
    channels = [
        construct_intro_example().channel,
        construct_case(DiagonalObservable.from_lambdas([7.0, 2.0, 4.0])).channel,
        construct_general_d(DiagonalObservable.from_lambdas([1.0, 2.0, 3.0, 4.0, 5.0])).channel,
        construct_general_placement(DiagonalObservable.from_lambdas([5.0, 1.0, 9.0, 2.0])).channel,
    ]
    for ch in channels:
        for _ in range(50):
            rho = (
                rand_density_matrix(rng, ch.dim)
                if rng.uniform() < 0.5
                else rand_pure_state(rng, ch.dim).density()
            )
            out = apply_channel(ch, rho)
            assert l1_coherence(out) <= l1_coherence(rho) + 1e-8
            assert relative_entropy_coherence(out) <= relative_entropy_coherence(rho) + 1e-8


# ---------------------------------------------------------------------------
# composition and serialization
# ---------------------------------------------------------------------------

def test_compose_channels(rng):
    a = sample_incoherent_channel(rng, 3, 2)
    b = sample_incoherent_channel(rng, 3, 2)
    ab = compose(a, b)
    assert ab.branches == 4
    rho = rand_density_matrix(rng, 3)
    direct = apply_channel(a, apply_channel(b, rho))
    composed = apply_channel(ab, rho)
    assert np.linalg.norm(direct.matrix - composed.matrix) < 1e-10


def test_channel_json_roundtrip_exact(rng):
    ch = sample_incoherent_channel(rng, 4, 3)
    doc = json.loads(canonical_json(channel_to_dict(ch)))
    restored = channel_from_dict(doc)
    assert restored.dim == ch.dim
    for a, b in zip(restored.kraus_ops, ch.kraus_ops):
        assert np.array_equal(a, b)


def test_channel_json_shape():
    ch = validate_completeness(intro_ops())
    doc = channel_to_dict(ch)
    assert doc["dim"] == 3
    assert len(doc["kraus"]) == 3
    assert len(doc["kraus"][0]) == 9  # flat row-major pairs
    assert doc["kraus"][0][0] == [1 / np.sqrt(2), 0.0]
