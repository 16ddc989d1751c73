"""Seeded simulation of the letter process, the walk W, and the chain H.

RNG contract: numpy PCG64 via ``default_rng(SeedSequence(master_seed,
stream_index))``; letters are drawn by inverse CDF (searchsorted against
the cumulative letter law), so runs are bit-reproducible given the master
seed and the fixed batching constants recorded in the output metadata.

The coupled chain uses the prefix property of highest words: the fully
raised word r = P(a_1 (x) ... (x) a_l) has the raised prefixes as its own
prefixes, so H_k = wt(r_1 ... r_k) for every k from a single Pitman
computation.  Raising only a maintained highest word after each append is
NOT equivalent (the component of b (x) a is not determined by the highest
vertex of b alone), which is why the raw letters are kept and the prefix
identity is re-verified from scratch at periodic checkpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import counting
from .crystal import Crystal
from .rootsystem import Weight, w_add
from .spectral import SpectralParams

CHECKPOINT_EVERY = 64
MC_BATCH = 4096
MC_CHUNK = 256

RNG_METADATA = {
    "rng": "numpy PCG64 (numpy.random.default_rng)",
    "stream_split": "SeedSequence(master_seed, stream_index); inverse-CDF letter draws",
}


def _cumulative(params: SpectralParams) -> np.ndarray:
    cum = np.cumsum(np.asarray(params.letter_probs, dtype=np.float64))
    cum[-1] = 1.0
    return cum


def draw_letters(params: SpectralParams, ell: int, seed) -> np.ndarray:
    """ell i.i.d. letter ids under the crystal law, deterministic in seed."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    u = rng.random(ell)
    return np.searchsorted(_cumulative(params), u, side="right").astype(np.int64)


def _raise_once(crystal: Crystal, ids: list[int], i0: int) -> bool:
    """Apply the raising operator e_{i0+1} to the word if eps > 0."""
    eps = crystal.eps
    phi = crystal.phi
    plus = 0
    pos = -1
    for k, v in enumerate(ids):
        e = eps[v][i0]
        if e:
            if e > plus:
                pos = k
                plus = 0
            else:
                plus -= e
        plus += phi[v][i0]
    if pos < 0:
        return False
    ids[pos] = crystal.e_action[ids[pos]][i0]
    return True


def raise_word_ids(crystal: Crystal, ids) -> list[int]:
    """Pitman transform on homogeneous letter ids (scan i = 1..n, repeat)."""
    ids = list(ids)
    n = crystal.spec.rank
    while True:
        for i0 in range(n):
            if _raise_once(crystal, ids, i0):
                break
        else:
            return ids


@dataclass(frozen=True)
class Trajectory:
    """One coupled realization of (letters, W, H) plus checkpoint audit."""

    seed: int
    letters: tuple[int, ...]
    W_path: tuple[Weight, ...]
    H_path: tuple[Weight, ...]
    checkpoints: tuple[int, ...]
    metadata: dict = field(default_factory=dict)


def sample_trajectory(
    params: SpectralParams,
    ell: int,
    seed: int,
    checkpoint_every: int = CHECKPOINT_EVERY,
) -> Trajectory:
    """Simulate ell steps; paths are indexed 0..ell with position 0 at zero.

    H is read off the prefixes of the fully raised word; at every
    ``checkpoint_every``-th index the prefix is re-raised from the raw
    letters and compared, guarding the prefix-property implementation.
    """
    crystal = params.crystal
    spec = params.spec
    letters = draw_letters(params, ell, seed)
    ids = letters.tolist()
    raised = raise_word_ids(crystal, ids)
    zero = spec.zero()
    W_path = [zero]
    H_path = [zero]
    for k in range(ell):
        W_path.append(w_add(W_path[-1], crystal.weights[ids[k]]))
        H_path.append(w_add(H_path[-1], crystal.weights[raised[k]]))
    checkpoints = []
    for k in range(checkpoint_every, ell + 1, checkpoint_every):
        fresh = raise_word_ids(crystal, ids[:k])
        h_k = zero
        for v in fresh:
            h_k = w_add(h_k, crystal.weights[v])
        if h_k != H_path[k]:
            raise AssertionError(
                f"incremental H drifted from scratch recomputation at step {k}"
            )
        checkpoints.append(k)
    return Trajectory(
        seed=seed,
        letters=tuple(ids),
        W_path=tuple(W_path),
        H_path=tuple(H_path),
        checkpoints=tuple(checkpoints),
        metadata=dict(RNG_METADATA),
    )


# -- empirical transition kernel of H -----------------------------------------


@dataclass
class HKernelReport:
    """Pooled empirical transitions of H versus the exact kernel."""

    n_traj: int
    ell: int
    master_seed: int
    entries: list[dict]
    dropped_states: list[Weight]
    fraction_within_3sigma: float
    max_abs_z: float
    metadata: dict = field(default_factory=dict)


def estimate_H_kernel(
    params: SpectralParams,
    n_traj: int,
    ell: int,
    master_seed: int,
    min_visits: int = 100,
) -> HKernelReport:
    """Pool (H_k -> H_{k+1}) frequencies over trajectories and compare to Pi_H.

    Entries for states visited at least ``min_visits`` times get a
    standardized deviation z = (count - V p) / sqrt(V p (1-p)); less
    visited states are dropped and reported.
    """
    crystal = params.crystal
    spec = params.spec
    scaled_wt = [spec.scaled(w) for w in crystal.weights]
    cum = _cumulative(params)
    counts: dict[tuple, dict[tuple, int]] = {}
    for idx in range(n_traj):
        rng = np.random.default_rng(np.random.SeedSequence((master_seed, idx)))
        u = rng.random(ell)
        ids = np.searchsorted(cum, u, side="right").tolist()
        raised = raise_word_ids(crystal, ids)
        cur = (0,) * spec.ambient_dim
        for v in raised:
            st = scaled_wt[v]
            nxt = tuple(a + b for a, b in zip(cur, st))
            bucket = counts.get(cur)
            if bucket is None:
                bucket = counts[cur] = {}
            bucket[nxt] = bucket.get(nxt, 0) + 1
            cur = nxt

    from .markov import kernel_H  # local import to avoid a cycle at module load

    entries: list[dict] = []
    dropped: list[Weight] = []
    step_set = sorted(set(crystal.weights), reverse=True)
    for cur_scaled, bucket in sorted(counts.items()):
        visits = sum(bucket.values())
        mu = spec.unscaled(cur_scaled)
        if visits < min_visits:
            dropped.append(mu)
            continue
        # All kernel-positive successors count as trials, observed or not.
        succ = [w_add(mu, g) for g in step_set if spec.is_dominant(w_add(mu, g))]
        states = tuple(dict.fromkeys([mu] + succ))
        exact = kernel_H(params, states)
        for lam in succ:
            p = exact.prob(mu, lam)
            if p <= 0.0 or p >= 1.0:
                continue
            observed = bucket.get(spec.scaled(lam), 0)
            z = (observed - visits * p) / math.sqrt(visits * p * (1.0 - p))
            entries.append(
                {
                    "state": mu,
                    "next": lam,
                    "visits": visits,
                    "observed": observed,
                    "expected_p": p,
                    "z": z,
                }
            )
    within = sum(1 for e in entries if abs(e["z"]) <= 3.0)
    frac = within / len(entries) if entries else 1.0
    max_z = max((abs(e["z"]) for e in entries), default=0.0)
    return HKernelReport(
        n_traj=n_traj,
        ell=ell,
        master_seed=master_seed,
        entries=entries,
        dropped_states=dropped,
        fraction_within_3sigma=frac,
        max_abs_z=max_z,
        metadata={**RNG_METADATA, "min_visits": min_visits},
    )


# -- Monte Carlo exit probability ---------------------------------------------


@dataclass
class MCExitEstimate:
    estimate: float
    sigma: float
    n_traj: int
    horizon: int
    survivors: int
    metadata: dict = field(default_factory=dict)


def exit_probability_mc(
    params: SpectralParams,
    lam: Weight,
    horizon: int,
    n_traj: int,
    master_seed: int,
    batch: int = MC_BATCH,
    chunk: int = MC_CHUNK,
) -> MCExitEstimate:
    """Fraction of walks from lam staying dominant up to the horizon.

    Vectorized over fixed-size batches, each on its own deterministic
    substream; the finite horizon biases the estimate upward by the
    (exponentially small, for drift in C) chance of exiting later.
    """
    spec = params.spec
    if not spec.is_dominant(lam):
        raise ValueError("start weight must be dominant")
    crystal = params.crystal
    n_forms = spec.rank
    # Integer pairing increments per letter and starting pairings from lam.
    incr = np.empty((n_forms, crystal.dim), dtype=np.int64)
    for i in range(n_forms):
        for v, w in enumerate(crystal.weights):
            p = spec.pairing(w, i + 1)
            assert p.denominator == 1
            incr[i, v] = int(p)
    start = np.array(
        [int(spec.pairing(lam, i + 1)) for i in range(n_forms)], dtype=np.int64
    )
    cum = _cumulative(params)
    survivors = 0
    done = 0
    batch_index = 0
    while done < n_traj:
        size = min(batch, n_traj - done)
        rng = np.random.default_rng(np.random.SeedSequence((master_seed, batch_index)))
        offsets = np.tile(start, (size, 1))  # (size, n_forms)
        alive = np.ones(size, dtype=bool)
        steps_left = horizon
        while steps_left > 0 and alive.any():
            csize = min(chunk, steps_left)
            u = rng.random((int(alive.sum()), csize))
            draws = np.searchsorted(cum, u, side="right")
            live_off = offsets[alive]
            ok = np.ones(draws.shape[0], dtype=bool)
            for i in range(n_forms):
                paths = live_off[:, i][:, None] + np.cumsum(incr[i][draws], axis=1)
                ok &= paths.min(axis=1) >= 0
                live_off[:, i] = paths[:, -1]
            offsets[alive] = live_off
            idx = np.flatnonzero(alive)
            alive[idx[~ok]] = False
            steps_left -= csize
        survivors += int(alive.sum())
        done += size
        batch_index += 1
    p_hat = survivors / n_traj
    sigma = math.sqrt(max(p_hat * (1.0 - p_hat), 1e-300) / n_traj)
    return MCExitEstimate(
        estimate=p_hat,
        sigma=sigma,
        n_traj=n_traj,
        horizon=horizon,
        survivors=survivors,
        metadata={
            **RNG_METADATA,
            "batch": batch,
            "chunk": chunk,
            "note": "finite horizon biases the estimate upward",
        },
    )
