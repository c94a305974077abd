"""Randomized hunt for coherence-monotonicity violations.

Trials are fully determined by (seed, trial index): each trial spawns its own
generator from a SeedSequence keyed on the pair, so serial and fan-out runs
produce identical reports.  Channels are sampled structurally incoherent by
construction (one nonzero per column, per-branch permutation targets, weights
column-stochastic), which makes completeness exact without rejection.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channels import (
    KrausChannel,
    apply_channel,
    is_incoherent_channel,
    validate_completeness,
)
from .constructions import (
    CounterexampleInstance,
    construct_case,
    construct_general_placement,
    cyclic_kraus_family,
    instance_to_dict,
    validate_instance,
)
from .errors import IncompleteKrausSet, InvalidConfig
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

CHANNEL_FAMILIES = ("cyclic-uniform", "random-incoherent", "paper-seeded")
MEASURE_NAMES = ("skew", "l1", "relent")

# Generator identity recorded in every report: per-trial streams are
# numpy PCG64 bit generators keyed by SeedSequence(entropy=seed, spawn_key=(trial,)).
RNG_ALGORITHM = "numpy-pcg64-seedsequence(entropy=seed, spawn_key=(trial,))"

# A trial counts as a violation when the measure grows by more than this.
VIOLATION_EPS = 1e-8


@dataclass(frozen=True)
class SearchConfig:
    dim: int = 3
    trials: int = 1000
    seed: int = 0
    channel_family: str = "random-incoherent"
    measures: tuple[str, ...] = MEASURE_NAMES
    lambda_range: tuple[float, float] = (0.0, 10.0)

    def __post_init__(self):
        if self.dim < 2:
            raise InvalidConfig("dim must be >= 2")
        if self.trials < 1:
            raise InvalidConfig("trials must be >= 1")
        if not (0 <= self.seed < 2**64):
            raise InvalidConfig("seed must fit in 64 bits")
        if self.channel_family not in CHANNEL_FAMILIES:
            raise InvalidConfig(f"unknown channel family {self.channel_family!r}")
        object.__setattr__(self, "measures", tuple(dict.fromkeys(self.measures)))
        if not self.measures or any(m not in MEASURE_NAMES for m in self.measures):
            raise InvalidConfig(f"measures must be a nonempty subset of {MEASURE_NAMES}")
        lo, hi = self.lambda_range
        if not (float(lo) < float(hi)):
            raise InvalidConfig("lambda_range must be a nonempty interval")
        object.__setattr__(self, "lambda_range", (float(lo), float(hi)))
        if self.channel_family == "paper-seeded" and self.dim < 3:
            raise InvalidConfig("the seeded constructions need dim >= 3")


@dataclass
class MeasureResult:
    violations: int = 0
    best: Optional[CounterexampleInstance] = None


@dataclass
class ViolationReport:
    config: SearchConfig
    rng: str
    results: dict[str, MeasureResult]
    wall_time_s: float


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))
    )


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def sample_nondegenerate_lambdas(
    rng: np.random.Generator, dim: int, lo: float, hi: float
) -> np.ndarray:
    """Uniform draw over the box with a minimum-gap guarantee of 1e-3 * span."""
    span = hi - lo
    min_gap = 1e-3 * span
    for _ in range(200):
        lam = rng.uniform(lo, hi, size=dim)
        if float(np.diff(np.sort(lam)).min()) > min_gap:
            return lam
    # pathological ranges: fall back to an evenly spaced shuffle
    lam = np.linspace(lo + 0.25 * span, hi - 0.25 * span, dim)
    rng.shuffle(lam)
    return lam


def rand_pure_state(rng: np.random.Generator, dim: int) -> PureState:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState.from_amplitudes(v / np.linalg.norm(v))


def rand_density_matrix(
    rng: np.random.Generator, dim: int, rank: Optional[int] = None
) -> DensityMatrix:
    r = dim if rank is None else rank
    g = rng.standard_normal((dim, r)) + 1j * rng.standard_normal((dim, r))
    m = g @ g.conj().T
    return DensityMatrix.from_matrix(m / np.trace(m).real)


def rand_diagonal_density(rng: np.random.Generator, dim: int) -> DensityMatrix:
    return DensityMatrix.from_matrix(np.diag(rng.dirichlet(np.ones(dim))).astype(complex))


def sample_incoherent_channel(
    rng: np.random.Generator,
    dim: int,
    branches: int,
    targets: Optional[np.ndarray] = None,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> KrausChannel:
    """Draw a structurally incoherent channel with exact completeness.

    Per column j the branch weights w[., j] come from a Dirichlet draw (so
    they sum to one), and branch n places sqrt(w[n, j]) times a random phase
    at row targets[n][j].  Target maps are permutations drawn per branch:
    injectivity keeps the Gram matrix sum A^dag A diagonal, which is what
    makes column-stochastic weights sufficient for completeness.
    """
    if targets is None:
        targets = np.stack([rng.permutation(dim) for _ in range(branches)])
    else:
        targets = np.asarray(targets, dtype=int)
    if branches == 1:
        weights = np.ones((1, dim))
    else:
        weights = rng.dirichlet(np.ones(branches), size=dim).T  # shape (branches, dim)
    phases = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=(branches, dim)))
    ops = []
    for n in range(branches):
        a = np.zeros((dim, dim), dtype=complex)
        a[targets[n], np.arange(dim)] = np.sqrt(weights[n]) * phases[n]
        ops.append(a)
    return validate_completeness(ops, tol=tol)


def _jitter_channel(
    channel: KrausChannel, rng: np.random.Generator, scale: float, tol: ToleranceConfig
) -> KrausChannel:
    """Perturb nonzero entries multiplicatively, then renormalize per column.

    Valid only for families whose Gram sum is diagonal (one nonzero per
    column, per-branch injective targets): renormalizing each column's total
    weight back to one restores exact completeness.
    """
    perturbed = []
    for a in channel.kraus_ops:
        factor = 1.0 + scale * rng.uniform(-1.0, 1.0, size=a.shape)
        phase = np.exp(1j * scale * rng.uniform(-np.pi, np.pi, size=a.shape))
        perturbed.append(np.where(np.abs(a) > 0, a * factor * phase, 0.0))
    col_weight = sum(np.sum(np.abs(a) ** 2, axis=0) for a in perturbed)
    renorm = 1.0 / np.sqrt(col_weight)
    return validate_completeness([a * renorm for a in perturbed], tol=tol)


# ---------------------------------------------------------------------------
# the search itself
# ---------------------------------------------------------------------------

def _seeded_construction(observable: DiagonalObservable, tol: ToleranceConfig):
    if observable.dim == 3:
        return construct_case(observable, tol=tol)
    return construct_general_placement(observable, tol=tol)


def _trial_candidate(
    config: SearchConfig, rng: np.random.Generator, trial: int, tol: ToleranceConfig
) -> tuple[DiagonalObservable, KrausChannel, PureState]:
    dim = config.dim
    lo, hi = config.lambda_range
    if config.channel_family == "paper-seeded":
        if trial == 0:
            lam = np.array([1.0, 10.0, 5.0]) if dim == 3 else np.arange(1.0, dim + 1.0)
        else:
            lam = sample_nondegenerate_lambdas(rng, dim, lo, hi)
        observable = DiagonalObservable.from_lambdas(lam, tol=tol)
        inst = _seeded_construction(observable, tol)
        channel = inst.channel
        if trial % 2 == 1:
            channel = _jitter_channel(channel, rng, scale=0.05, tol=tol)
        return observable, channel, inst.input_state
    observable = DiagonalObservable.from_lambdas(
        sample_nondegenerate_lambdas(rng, dim, lo, hi), tol=tol
    )
    if config.channel_family == "cyclic-uniform":
        w = rng.dirichlet(np.ones(dim))
        amps = np.sqrt(w) * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=dim))
        channel = validate_completeness(cyclic_kraus_family(amps), tol=tol)
    else:  # random-incoherent
        branches = int(rng.integers(1, dim + 2))
        channel = sample_incoherent_channel(rng, dim, branches, tol=tol)
    return observable, channel, rand_pure_state(rng, dim)


def _coherences(
    name: str,
    psi: PureState,
    rho_in: DensityMatrix,
    rho_out: DensityMatrix,
    observable: DiagonalObservable,
    tol: ToleranceConfig,
) -> tuple[float, float]:
    if name == "skew":
        return skew_information_pure(psi, observable), skew_information(rho_out, observable, tol=tol)
    if name == "l1":
        return l1_coherence(rho_in), l1_coherence(rho_out)
    return relative_entropy_coherence(rho_in, tol=tol), relative_entropy_coherence(rho_out, tol=tol)


def run_search(config: SearchConfig, tol: ToleranceConfig = DEFAULT_TOL) -> ViolationReport:
    """Deterministic sweep; retains the largest-gain instance per measure.

    Tie-breaking for the retained instance: largest gain, then fewest
    branches, then earliest trial.  Every retained instance is revalidated
    from scratch before the report is returned.
    """
    t0 = time.perf_counter()
    results = {name: MeasureResult() for name in config.measures}
    best_key: dict[str, tuple[float, int]] = {}
    for trial in range(config.trials):
        rng = trial_rng(config.seed, trial)
        observable, channel, psi = _trial_candidate(config, rng, trial, tol)
        rho_in = psi.density(tol)
        rho_out = apply_channel(channel, rho_in, tol=tol)
        for name in config.measures:
            c_in, c_out = _coherences(name, psi, rho_in, rho_out, observable, tol)
            delta = c_out - c_in
            if delta <= VIOLATION_EPS:
                continue
            entry = results[name]
            entry.violations += 1
            key = (delta, -channel.branches)
            if entry.best is None or key > best_key[name]:
                if channel.incoherent_verified is None:
                    is_incoherent_channel(channel)
                entry.best = CounterexampleInstance(
                    observable=observable,
                    input_state=psi,
                    channel=channel,
                    output_state=rho_out,
                    delta=delta,
                    tag="search",
                )
                best_key[name] = key
    for name, entry in results.items():
        if entry.best is not None:
            validate_instance(entry.best, tol=tol, measure=name)
    return ViolationReport(
        config=config,
        rng=RNG_ALGORITHM,
        results=results,
        wall_time_s=time.perf_counter() - t0,
    )


def minimize_instance(
    inst: CounterexampleInstance,
    tol: ToleranceConfig = DEFAULT_TOL,
    measure: str = "skew",
) -> CounterexampleInstance:
    """Greedy shrink: drop branches and zero small amplitudes while the gain holds.

    A candidate move is accepted when the rebuilt instance revalidates and its
    gain stays above max(1e-6, 0.9 * original gain).  Idempotent on inputs
    that admit no such move.
    """
    validate_instance(inst, tol=tol, measure=measure)
    floor = max(1e-6, 0.9 * inst.delta)
    current = inst

    def rebuild(ops) -> Optional[CounterexampleInstance]:
        col_weight = sum(np.sum(np.abs(a) ** 2, axis=0) for a in ops)
        if np.any(col_weight <= 0.0):
            return None  # a column lost all weight; completeness unrecoverable
        renorm = 1.0 / np.sqrt(col_weight)
        try:
            channel = validate_completeness([a * renorm for a in ops], tol=tol)
        except IncompleteKrausSet:
            return None
        if not is_incoherent_channel(channel):
            return None
        rho_in = current.input_state.density(tol)
        rho_out = apply_channel(channel, rho_in, tol=tol)
        c_in, c_out = _coherences(measure, current.input_state, rho_in, rho_out, current.observable, tol)
        return CounterexampleInstance(
            observable=current.observable,
            input_state=current.input_state,
            channel=channel,
            output_state=rho_out,
            delta=c_out - c_in,
            tag=current.tag,
        )

    improved = True
    while improved:
        improved = False
        ops = list(current.channel.kraus_ops)
        # branch drops first: the biggest structural win
        for i in range(len(ops)):
            if len(ops) == 1:
                break
            cand = rebuild(ops[:i] + ops[i + 1 :])
            if cand is not None and cand.delta >= floor:
                current = cand
                improved = True
                break
        if improved:
            continue
        # then sparsification: zero entries carrying under 1% of column weight
        sparser = [np.where(np.abs(a) ** 2 < 0.01, 0.0, a) for a in ops]
        if any(np.any(s != a) for s, a in zip(sparser, ops)):
            cand = rebuild(sparser)
            if cand is not None and cand.delta >= floor:
                current = cand
                improved = True
    validate_instance(current, tol=tol, measure=measure)
    return current


# ---------------------------------------------------------------------------
# report serialization
# ---------------------------------------------------------------------------

def config_to_dict(config: SearchConfig) -> dict:
    return {
        "dim": config.dim,
        "trials": config.trials,
        "seed": config.seed,
        "channel_family": config.channel_family,
        "measures": list(config.measures),
        "lambda_range": [config.lambda_range[0], config.lambda_range[1]],
    }


def report_to_dict(report: ViolationReport, canonical: bool = True) -> dict:
    """Report document.  Canonical form zeroes the wall time so identical
    configurations serialize to identical bytes; the measured time stays on
    the dataclass (and on the CLI's diagnostic stream)."""
    return {
        "config": config_to_dict(report.config),
        "rng": report.rng,
        "results": {
            name: {
                "violations": entry.violations,
                "best": None if entry.best is None else instance_to_dict(entry.best, measure=name),
            }
            for name, entry in report.results.items()
        },
        "wall_time_s": 0.0 if canonical else report.wall_time_s,
    }


def report_to_csv(report: ViolationReport) -> str:
    """One summary row per measure."""
    lines = ["measure,violations,best_delta,best_tag"]
    for name, entry in report.results.items():
        if entry.best is None:
            lines.append(f"{name},{entry.violations},,")
        else:
            lines.append(f"{name},{entry.violations},{entry.best.delta!r},{entry.best.tag}")
    return "\n".join(lines) + "\n"
