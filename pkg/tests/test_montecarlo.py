import math

import pytest

from crystalwalk import build_root_system, make_params, minuscule_crystal, weight, word
from crystalwalk import markov, montecarlo
from crystalwalk.crystal import is_highest, pitman_transform
from crystalwalk.rootsystem import w_sub


def test_same_seed_identical_trajectory(gl2_params):
    a = montecarlo.sample_trajectory(gl2_params, 50, 123)
    b = montecarlo.sample_trajectory(gl2_params, 50, 123)
    assert a.letters == b.letters
    assert a.W_path == b.W_path and a.H_path == b.H_path
    c = montecarlo.sample_trajectory(gl2_params, 50, 124)
    assert c.letters != a.letters


def test_trajectory_invariants(c2_params):
    params = c2_params
    spec = params.spec
    crystal = params.crystal
    traj = montecarlo.sample_trajectory(params, 100, 7)
    step_set = set(crystal.weights)
    for k in range(100):
        assert w_sub(traj.W_path[k + 1], traj.W_path[k]) == crystal.weights[traj.letters[k]]
        assert spec.is_dominant(traj.H_path[k + 1])
        assert w_sub(traj.H_path[k + 1], traj.H_path[k]) in step_set
    assert traj.H_path[0] == spec.zero()
    assert traj.H_path[1] == spec.fundamental(1)  # first step is delta itself
    assert traj.checkpoints == (64,)


def test_empty_trajectory(gl2_params):
    traj = montecarlo.sample_trajectory(gl2_params, 0, 5)
    assert traj.letters == ()
    assert traj.W_path == (gl2_params.spec.zero(),)
    assert traj.H_path == (gl2_params.spec.zero(),)


def test_h_path_matches_scratch_pitman(c2_params):
    """Coupling identity at every index, not just checkpoints (small ell)."""
    params = c2_params
    crystal = params.crystal
    for seed in (1, 2, 3):
        traj = montecarlo.sample_trajectory(params, 24, seed, checkpoint_every=8)
        for k in range(1, 25):
            scratch = pitman_transform(word(crystal, traj.letters[:k]))
            assert scratch.weight() == traj.H_path[k]


def test_prefix_dominance_iff_prefix_highest(c2_params):
    """Minuscule bijection observed on sampled trajectories."""
    params = c2_params
    crystal = params.crystal
    spec = params.spec
    for seed in (11, 12):
        traj = montecarlo.sample_trajectory(params, 40, seed)
        for k in range(1, 41):
            prefix_dominant = all(spec.is_dominant(traj.W_path[j]) for j in range(k + 1))
            assert prefix_dominant == is_highest(word(crystal, traj.letters[:k]))


def test_letter_frequencies_within_3_sigma(gl2_params):
    n = 100_000
    letters = montecarlo.draw_letters(gl2_params, n, 42)
    freq = (letters == 0).mean()
    sigma = math.sqrt(0.7 * 0.3 / n)
    assert abs(freq - 0.7) <= 3 * sigma


def test_estimate_H_kernel_smoke(gl2_params):
    report = montecarlo.estimate_H_kernel(gl2_params, 400, 60, 17, min_visits=50)
    assert report.entries, "no well-visited entries"
    assert report.fraction_within_3sigma >= 0.9
    # From the origin the successor is delta with frequency 1: no (0,0) entry
    # survives the 0 < p < 1 filter, so it never contributes a z-score.
    assert all(e["state"] != gl2_params.spec.zero() for e in report.entries)


def test_exit_probability_mc_gl2(gl2_params):
    mc = montecarlo.exit_probability_mc(gl2_params, weight(0, 0), 2000, 20000, 42)
    formula = markov.exit_probability(gl2_params, weight(0, 0))
    assert abs(mc.estimate - formula) <= 3 * mc.sigma + 1e-3
    assert mc.estimate > 0
    again = montecarlo.exit_probability_mc(gl2_params, weight(0, 0), 2000, 20000, 42)
    assert again.estimate == mc.estimate  # bit-identical rerun


def test_exit_probability_mc_degenerate_drift(gl2):
    spec, crystal = gl2
    params = make_params(spec, crystal, (0.98,))
    mc = montecarlo.exit_probability_mc(params, spec.zero(), 500, 2000, 7)
    assert 0.0 <= mc.estimate < 0.2  # near-critical drift: tiny but no crash


def test_exit_probability_mc_positive_when_drift_inside(c2_params):
    mc = montecarlo.exit_probability_mc(c2_params, c2_params.spec.zero(), 800, 4000, 3)
    assert mc.estimate > 0


def test_mc_from_shifted_start(c2_params):
    deep = weight(6, 3)
    mc = montecarlo.exit_probability_mc(c2_params, deep, 800, 4000, 3)
    formula = markov.exit_probability(c2_params, deep)
    assert abs(mc.estimate - formula) <= 4 * mc.sigma + 1e-3


def test_metadata_documents_rng(gl2_params):
    traj = montecarlo.sample_trajectory(gl2_params, 10, 1)
    assert "PCG64" in traj.metadata["rng"]
    mc = montecarlo.exit_probability_mc(gl2_params, weight(0, 0), 10, 100, 1)
    assert "SeedSequence" in mc.metadata["stream_split"]
