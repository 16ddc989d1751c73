import math

import pytest

from crystalwalk import (
    ChamberDomainError,
    NotMinusculeError,
    build_root_system,
    make_params,
    minuscule_crystal,
    weight,
)
from crystalwalk import markov
from crystalwalk.counting import component_crystal, get_table
from crystalwalk.rootsystem import w_add


def test_kernel_W_gl2(gl2_params):
    params = gl2_params
    states = markov.reachable_window(params.spec, params.crystal, 3, False)
    kern = markov.kernel_W(params, states)
    beta = weight(1, 1)
    assert kern.prob(beta, weight(2, 1)) == pytest.approx(0.7, rel=1e-12)
    assert kern.prob(beta, weight(1, 2)) == pytest.approx(0.3, rel=1e-12)
    for i, s in enumerate(kern.states):
        if kern.complete[i]:
            assert kern.row_sum(s) == pytest.approx(1.0, abs=1e-12)


def test_kernel_W_cn(c2_params):
    params = c2_params
    states = markov.reachable_window(params.spec, params.crystal, 2, False)
    kern = markov.kernel_W(params, states)
    x = params.x
    assert kern.prob(weight(1, 0), weight(0, 0)) == pytest.approx(
        (1 / x[0]) / params.s_delta, rel=1e-12
    )


def test_kernel_H_rows_sum_to_one(c2_params):
    params = c2_params
    states = markov.dominant_window(params, 4)
    kern = markov.kernel_H(params, states)
    assert kern.prob(params.spec.zero(), weight(1, 0)) == pytest.approx(1.0, rel=1e-12)
    for i, s in enumerate(kern.states):
        if kern.complete[i]:
            assert kern.row_sum(s) == pytest.approx(1.0, abs=1e-10)
    assert kern.kind == "stochastic"


def test_kernel_H_gl2_value(gl2_params):
    params = gl2_params
    states = markov.dominant_window(params, 3)
    kern = markov.kernel_H(params, states)
    x1, x2 = params.x
    expected = (x1 ** 2 + x1 * x2 + x2 ** 2) / (x1 + x2) ** 2
    assert kern.prob(weight(1, 0), weight(2, 0)) == pytest.approx(expected, rel=1e-12)


def test_restrict_to_chamber(gl2_params):
    params = gl2_params
    states = markov.reachable_window(params.spec, params.crystal, 4, False)
    restricted = markov.restrict_to_chamber(markov.kernel_W(params, states))
    assert restricted.kind == "substochastic"
    assert all(params.spec.is_dominant(s) for s in restricted.states)
    # Only the epsilon_1 step stays dominant from the origin.
    assert restricted.row_sum(weight(0, 0)) == pytest.approx(0.7, rel=1e-12)
    # Interior rows away from the window edge keep full mass.
    assert restricted.row_sum(weight(2, 1)) == pytest.approx(1.0, rel=1e-12)
    # Rows touching the window boundary are flagged incomplete.
    edge = restricted.index[weight(4, 0)]
    assert not restricted.complete[edge]


def test_doob_transform_basics(gl2_params):
    params = gl2_params
    states = markov.dominant_window(params, 3)
    kern = markov.kernel_W(params, states)
    ident = markov.doob_transform(kern, lambda s: 1.0)
    assert ident.entries == pytest.approx(kern.entries)
    with pytest.raises(ValueError):
        markov.doob_transform(kern, lambda s: 0.0)


@pytest.mark.parametrize("system,t", [
    (("A", 1, 1), (3 / 7,)),
    (("A", 2, 1), (0.5, 0.6)),
    (("C", 3, 1), (0.5, 0.5, 0.5)),
    (("B", 3, 3), (0.5, 0.6, 0.7)),
    (("D", 4, 4), (0.5, 0.6, 0.7, 0.8)),
])
def test_doob_equality_minuscule(system, t):
    ctype, rank, k = system
    spec = build_root_system(ctype, rank)
    crystal = minuscule_crystal(spec, spec.fundamental(k))
    params = make_params(spec, crystal, t)
    states = markov.dominant_window(params, 3)
    assert markov.doob_equality_residual(params, states) <= 1e-12
    # Kernel-level route: doob(Pi_W^Cbar, psi) equals Pi_H entrywise.
    window = markov.dominant_window(params, 4)
    restricted = markov.kernel_W_restricted(params, window)
    doob = markov.doob_transform(restricted, params.psi)
    kern_h = markov.kernel_H(params, window)
    worst = 0.0
    for mu in states:
        for lam in window:
            worst = max(worst, abs(doob.prob(mu, lam) - kern_h.prob(mu, lam)))
    assert worst <= 1e-12


def test_doob_obstruction_non_minuscule():
    spec = build_root_system("B", 2)
    spin = minuscule_crystal(spec, spec.fundamental(2))
    vec = component_crystal(spin, spec.fundamental(1))
    assert vec.dim == 5 and vec.multiplicity(spec.zero()) == 1
    from crystalwalk.spectral import letter_distribution, solve_x_from_t

    params = letter_distribution(vec, solve_x_from_t(spec, (0.6, 0.7)))
    witness = markov.doob_obstruction_witness(params)
    assert witness["obstructed"]
    assert witness["pi_w_cbar_00"] > 0 and witness["pi_h_00"] == 0.0


def test_psi_harmonicity(c2_params):
    states = markov.dominant_window(c2_params, 5)
    assert markov.psi_harmonicity_residual(c2_params, states) <= 1e-10


def test_prop_laws(gl2_params, c2_params):
    for params in (gl2_params, c2_params):
        for ell in (4, 8, 12):
            assert markov.prop_laws_residual(params, ell) <= 1e-10


def test_intertwiner_entries(gl2_params):
    params = gl2_params
    spec = params.spec
    assert markov.intertwiner_entry(params, spec.zero(), spec.zero()) == 1.0
    # minuscule lambda: x^beta / s_lambda on the orbit, 0 elsewhere
    lam = spec.fundamental(1)
    s = params.character(lam)
    assert markov.intertwiner_entry(params, lam, weight(1, 0)) == pytest.approx(
        params.x_pow(weight(1, 0)) / s, rel=1e-12
    )
    assert markov.intertwiner_entry(params, lam, weight(2, -1)) == 0.0
    table = markov.intertwiner(params, [lam, weight(2, 1)], set())
    for lam_key, total in table["row_sums"].items():
        assert total == pytest.approx(1.0, abs=1e-12)


def test_intertwining_residual_small(gl2_params, c2_params):
    for params in (gl2_params, c2_params):
        mu_states = markov.dominant_window(params, 3)
        beta_states = markov.reachable_window(params.spec, params.crystal, 2, False)
        assert markov.intertwining_residual(params, mu_states, beta_states) <= 1e-10


def test_green_basics(gl2_params):
    params = gl2_params
    spec = params.spec
    mu = weight(1, 0)
    table = markov.green_values(params, mu, [mu, weight(3, 1)])
    assert table.values[mu] >= 1.0  # the ell = 0 term alone contributes 1
    zero_table = markov.green_values(params, spec.zero(), [weight(3, 1)])
    assert zero_table.values[weight(3, 1)] > 0


def test_martin_reference_normalization(gl2_params):
    # K(0, lambda) = 1 for every lambda: numerator and denominator coincide.
    params = gl2_params
    recs = markov.martin_limit_check(params, params.spec.zero(), (20, 40))
    for r in recs:
        assert r["martin"] == pytest.approx(1.0, rel=1e-12)
        assert r["psi_mu"] == pytest.approx(1.0, rel=1e-12)


def test_exit_probability_gl2_gambler(gl2_params):
    """Gambler's-ruin oracle: stay probability = 1 - q/p for the difference
    walk; with (p, q) = (0.7, 0.3) this is 4/7."""
    assert markov.exit_probability(gl2_params, weight(0, 0)) == pytest.approx(
        1 - (0.3 / 0.7), rel=1e-12
    )


def test_exit_probability_deep_start_tends_to_one(c2_params):
    vals = [
        markov.exit_probability(c2_params, weight(2 * a, a)) for a in (1, 4, 16, 64)
    ]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] > 0.999


def test_exit_probability_closed_forms_c2_d4():
    """The displayed products over positive roots, written out literally."""
    c2 = build_root_system("C", 2)
    crystal = minuscule_crystal(c2, c2.fundamental(1))
    params = make_params(c2, crystal, (0.5, 0.5))
    x = params.x
    prod = (1 - x[1] / x[0]) * (1 - 1 / (x[0] * x[1]))
    prod *= (1 - 1 / x[0] ** 2) * (1 - 1 / x[1] ** 2)
    nu = weight(2, 1)
    expected = params.x_pow(nu) ** -1 * params.character(nu) * prod
    assert markov.exit_probability(params, nu) == pytest.approx(expected, rel=1e-10)

    d4 = build_root_system("D", 4)
    crystal4 = minuscule_crystal(d4, d4.fundamental(1))
    params4 = make_params(d4, crystal4, (0.5, 0.6, 0.7, 0.8))
    x = params4.x
    prod = 1.0
    for i in range(4):
        for j in range(i + 1, 4):
            prod *= (1 - x[j] / x[i]) * (1 - 1 / (x[i] * x[j]))
    nu = d4.zero()
    assert markov.exit_probability(params4, nu) == pytest.approx(prod, rel=1e-10)


def test_exit_probability_domain_error(gl2):
    spec, crystal = gl2
    params = make_params(spec, crystal, (1.4,))
    with pytest.raises(ChamberDomainError):
        markov.exit_probability(params, spec.zero())


def test_survival_series(gl2_params):
    params = gl2_params
    series = markov.survival_series(params, weight(0, 0), 40, stride=1)
    assert series[0] == 1.0
    assert series[1] == pytest.approx(0.7, rel=1e-12)
    assert all(b <= a + 1e-15 for a, b in zip(series, series[1:]))
    floor = markov.exit_probability(params, weight(0, 0))
    assert all(v >= floor - 1e-12 for v in series)


def test_survival_matches_exact_count_route(gl2_params, c2_params):
    """Dual route: the float mass DP equals sum_mu f^L_{mu/lam} x^{mu-lam}/s^L
    assembled from the exact big-integer table."""
    for params, lam in ((gl2_params, weight(1, 0)), (c2_params, weight(1, 1))):
        spec = params.spec
        L = 12
        table = get_table(params.crystal, lam)
        row = table.row(L)
        exact = sum(
            float(f) * params.x_pow(w_add(mu, tuple(-c for c in lam))) / params.s_delta ** L
            for mu, f in row.items()
        )
        dp = markov.survival_dp(params, lam, L)
        assert dp == pytest.approx(exact, rel=1e-12)


def test_quotient_h_zero_is_identity(gl2_params):
    recs = markov.quotient_ratio_checks(gl2_params, "llt", (10, 20), weight(0, 0))
    assert all(r["ratio"] == pytest.approx(1.0, abs=1e-12) for r in recs)


def test_quotient_skips_wrong_coset(c2_params):
    recs = markov.quotient_ratio_checks(c2_params, "llt", (10, 20), weight(0, 1))
    assert all(r["skipped"] for r in recs)
    assert all("coset" in r["reason"] for r in recs)


def test_quotient_rejects_bad_mode(gl2_params):
    with pytest.raises(ValueError):
        markov.quotient_ratio_checks(gl2_params, "wrong", (10,), weight(1, -1))


def test_minuscule_type_d4_suite():
    spec = build_root_system("D", 4)
    params = markov.minuscule_type_params(spec, (1, 3, 4), (0.55, 0.6, 0.65, 0.7))
    report = markov.minuscule_type_report(params)
    assert report["k_multiplicity_free"]
    assert report["num_transitions"] == 2 ** 4 + 2 * 4
    assert report["doob_residual"] <= 1e-12


def test_minuscule_type_a3_pair():
    spec = build_root_system("A", 3)
    params = markov.minuscule_type_params(spec, (1, 2), (0.5, 0.6, 0.7))
    assert set(params.crystal.weight_multiplicities.values()) == {1}


def test_minuscule_type_single_component_reduces(c2_params):
    spec = c2_params.spec
    params = markov.minuscule_type_params(spec, (1,), (0.5, 0.5))
    states = markov.dominant_window(params, 3)
    a = markov.kernel_W(params, states).entries
    b = markov.kernel_W(c2_params, states).entries
    assert a == pytest.approx(b)


def test_minuscule_type_shared_weight_rejected():
    spec = build_root_system("D", 4)
    with pytest.raises(NotMinusculeError):
        markov.minuscule_type_params(spec, (1, 1), (0.5, 0.5, 0.5, 0.5))


def test_kernel_H_rejects_non_dominant_state(gl2_params):
    with pytest.raises(ValueError):
        markov.kernel_H(gl2_params, (weight(0, 1),))
