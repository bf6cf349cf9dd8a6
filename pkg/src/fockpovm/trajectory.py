"""Monte-Carlo simulation of repeated finite-resolution number measurements.

Outcomes are drawn from the exact mixture form of the outcome density:
pick an integer level n with probability rho_nn, then read
n_m ~ Normal(n, dn^2). The marginal of n_m is exactly the operator
pipeline's density, with no grid discretization. Each outcome then
updates the state through the conditional measurement map, so a
trajectory acts as a likelihood filter: the number distribution
concentrates on a single level while the coherence decays, and the
ensemble average over outcomes reproduces the non-selective damping
map.

Randomness comes from numpy's PCG64 generator seeded with a 64-bit
integer. Multi-shot runs derive per-shot seeds as
``seed XOR (shot_index * 0x9E3779B97F4A7C15 mod 2^64)`` (the 64-bit
golden-ratio increment), so shot 0 reproduces a single run with the
base seed, shots are independent and parallelizable, and the
aggregation order is fixed by shot index.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from .errors import NegligibleOutcome
from .fock import DensityMatrix, number_expectation, purity
from .measurement import Resolution, apply_measurement, as_resolution

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class TrajectoryConfig:
    """Resolution, length, and RNG seed of one measurement sequence."""

    dn: float | Resolution
    steps: int
    seed: int
    record_states: bool = False

    def __post_init__(self):
        object.__setattr__(self, "dn", as_resolution(self.dn).dn)
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        seed = int(self.seed)
        if seed != self.seed or not 0 <= seed <= _SEED_MASK:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        object.__setattr__(self, "seed", seed)


@dataclass(frozen=True)
class TrajectoryStep:
    """Observables of the conditional state after one measurement."""

    index: int
    nm: float
    post_number: float
    post_coherence: complex
    post_purity: float
    state: DensityMatrix | None = None


@dataclass(frozen=True)
class EnsembleStepStats:
    """Across-shot means of the per-step observables."""

    index: int
    mean_number: float
    mean_coherence: complex
    mean_purity: float


@dataclass(frozen=True)
class EnsembleStats:
    """Per-step ensemble means plus the per-shot final records."""

    steps: list[EnsembleStepStats]
    final_numbers: np.ndarray
    final_coherences: np.ndarray
    final_purities: np.ndarray


@dataclass(frozen=True)
class ChiSquareResult:
    """Goodness of fit of final-level counts against reference populations."""

    statistic: float
    pvalue: float
    dof: int
    observed: np.ndarray
    expected: np.ndarray


def make_rng(seed: int) -> np.random.Generator:
    """Deterministic PCG64 stream for a seed."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def split_seed(seed: int, index: int) -> int:
    """Per-shot seed: XOR with the golden-ratio multiple of the shot index."""
    return (int(seed) ^ ((int(index) * GOLDEN_GAMMA) & _SEED_MASK)) & _SEED_MASK


def _sample_level(populations: np.ndarray, u: float) -> int:
    cum = np.cumsum(np.clip(populations, 0.0, None))
    return min(int(np.searchsorted(cum, u * cum[-1], side="right")), len(cum) - 1)


def sample_outcome(rho: DensityMatrix, dn, rng: np.random.Generator) -> float:
    """One outcome draw: level n from the populations, then Normal(n, dn)."""
    res = as_resolution(dn)
    level = _sample_level(rho.populations, rng.random())
    return float(rng.normal(loc=level, scale=res.dn))


def sample_outcomes(rho: DensityMatrix, dn, rng: np.random.Generator, size: int) -> np.ndarray:
    """Vectorized batch of independent outcome draws (same marginal as sample_outcome)."""
    res = as_resolution(dn)
    cum = np.cumsum(np.clip(rho.populations, 0.0, None))
    levels = np.searchsorted(cum, rng.random(size) * cum[-1], side="right")
    levels = np.minimum(levels, rho.dim - 1)
    return levels + rng.normal(0.0, res.dn, size)


def run_trajectory(rho0: DensityMatrix, cfg: TrajectoryConfig) -> list[TrajectoryStep]:
    """Measure cfg.steps times in sequence, recording per-step observables.

    Deterministic given cfg (including the seed). NegligibleOutcome
    cannot occur for outcomes drawn from the state itself short of
    float underflow; if it does, it is re-raised with the step named.
    """
    rng = make_rng(cfg.seed)
    state = rho0
    steps: list[TrajectoryStep] = []
    for index in range(cfg.steps):
        nm = sample_outcome(state, cfg.dn, rng)
        try:
            record = apply_measurement(state, cfg.dn, nm)
        except NegligibleOutcome as exc:
            raise NegligibleOutcome(f"step {index} (n_m={nm!r}): {exc}") from exc
        state = record.post_state
        steps.append(
            TrajectoryStep(
                index=index,
                nm=nm,
                post_number=number_expectation(state),
                post_coherence=record.post_coherence,
                post_purity=purity(state),
                state=state if cfg.record_states else None,
            )
        )
    return steps


def ensemble_stats(
    rho0: DensityMatrix,
    cfg: TrajectoryConfig,
    shots: int,
    workers: int | None = None,
) -> EnsembleStats:
    """Across-shot statistics of repeated-measurement trajectories.

    Shot i runs with seed split_seed(cfg.seed, i), so shots=1 reproduces
    run_trajectory with the base seed. The reduction sums in shot order
    regardless of worker scheduling, keeping results reproducible.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    base = replace(cfg, record_states=False)

    def one_shot(index: int) -> list[TrajectoryStep]:
        return run_trajectory(rho0, replace(base, seed=split_seed(cfg.seed, index)))

    number_sum = np.zeros(cfg.steps)
    coherence_sum = np.zeros(cfg.steps, dtype=complex)
    purity_sum = np.zeros(cfg.steps)
    final_numbers = np.empty(shots)
    final_coherences = np.empty(shots, dtype=complex)
    final_purities = np.empty(shots)

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=min(workers, shots)) as pool:
            runs = list(pool.map(one_shot, range(shots)))
    else:
        runs = (one_shot(i) for i in range(shots))
    for i, steps in enumerate(runs):
        number_sum += [s.post_number for s in steps]
        coherence_sum += [s.post_coherence for s in steps]
        purity_sum += [s.post_purity for s in steps]
        final_numbers[i] = steps[-1].post_number
        final_coherences[i] = steps[-1].post_coherence
        final_purities[i] = steps[-1].post_purity

    step_stats = [
        EnsembleStepStats(
            index=k,
            mean_number=number_sum[k] / shots,
            mean_coherence=coherence_sum[k] / shots,
            mean_purity=purity_sum[k] / shots,
        )
        for k in range(cfg.steps)
    ]
    return EnsembleStats(
        steps=step_stats,
        final_numbers=final_numbers,
        final_coherences=final_coherences,
        final_purities=final_purities,
    )


def collapse_chi_square(
    populations: np.ndarray,
    final_numbers: np.ndarray,
    min_expected: float = 5.0,
) -> ChiSquareResult:
    """Chi-square of rounded final <n> counts against reference populations.

    Adjacent number bins are merged left to right until each group's
    expected count reaches min_expected (a light trailing group joins
    its predecessor), which keeps the test valid in the Poisson tails.
    """
    populations = np.asarray(populations, dtype=float)
    final_numbers = np.asarray(final_numbers, dtype=float)
    shots = final_numbers.size
    if shots < 1:
        raise ValueError("final_numbers must be nonempty")
    dim = populations.size
    rounded = np.clip(np.rint(final_numbers).astype(int), 0, dim - 1)
    observed_full = np.bincount(rounded, minlength=dim).astype(float)
    expected_full = populations * shots

    observed_groups: list[float] = []
    expected_groups: list[float] = []
    obs_acc = exp_acc = 0.0
    for obs, exp in zip(observed_full, expected_full):
        obs_acc += obs
        exp_acc += exp
        if exp_acc >= min_expected:
            observed_groups.append(obs_acc)
            expected_groups.append(exp_acc)
            obs_acc = exp_acc = 0.0
    if obs_acc > 0.0 or exp_acc > 0.0:
        if expected_groups:
            observed_groups[-1] += obs_acc
            expected_groups[-1] += exp_acc
        else:
            observed_groups, expected_groups = [obs_acc], [exp_acc]

    observed = np.asarray(observed_groups)
    expected = np.asarray(expected_groups)
    statistic = float(np.sum((observed - expected) ** 2 / expected))
    dof = max(observed.size - 1, 1)
    pvalue = float(stats.chi2.sf(statistic, dof))
    return ChiSquareResult(
        statistic=statistic, pvalue=pvalue, dof=dof, observed=observed, expected=expected
    )
