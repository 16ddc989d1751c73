import itertools
import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crystalwalk import (
    NotMinusculeError,
    ResourceLimitError,
    apply_e,
    apply_f,
    build_root_system,
    decompose_tensor_power,
    extract_component,
    is_highest,
    minuscule_crystal,
    pitman_transform,
    tensor_eps_phi,
    weight,
    word,
    word_from_weights,
)
from crystalwalk.crystal import TensorWord, iter_words_with_state
from crystalwalk.rootsystem import w_add, w_sub


def chain_arrow_labels(crystal):
    labels = []
    v = crystal.highest_vertices[0]
    while True:
        nxt = [(i + 1, t) for i, t in enumerate(crystal.f_action[v]) if t is not None]
        if not nxt:
            return labels
        assert len(nxt) == 1, "not a chain"
        labels.append(nxt[0][0])
        v = nxt[0][1]


def test_c3_vector_crystal_chain(c3):
    # 1 ->1 2 ->2 3 ->3 3bar ->2 2bar ->1 1bar
    _, crystal = c3
    assert crystal.dim == 6
    assert chain_arrow_labels(crystal) == [1, 2, 3, 2, 1]


def test_gl3_vector_chain(gl3):
    _, crystal = gl3
    assert crystal.dim == 3
    assert chain_arrow_labels(crystal) == [1, 2]


def test_b3_spin_crystal(b3):
    _, crystal = b3
    assert crystal.dim == 8
    assert all(all(abs(c) * 2 == 1 for c in w) for w in crystal.weights)


def test_non_minuscule_rejected(c3):
    spec, _ = c3
    with pytest.raises(NotMinusculeError) as err:
        minuscule_crystal(spec, spec.fundamental(2))
    assert "w1" in str(err.value)  # error names the allowed table entries


def test_crystal_structural_invariants(all_minuscule_systems):
    for spec, crystal in all_minuscule_systems:
        highest = crystal.highest_vertices
        assert len(highest) == 1
        delta = crystal.weights[highest[0]]
        assert spec.is_dominant(delta)
        for v in range(crystal.dim):
            for i in range(1, spec.rank + 1):
                pairing = spec.pairing(crystal.weights[v], i)
                assert crystal.phi[v][i - 1] - crystal.eps[v][i - 1] == pairing
                tgt = crystal.f_action[v][i - 1]
                if tgt is not None:
                    assert crystal.weights[tgt] == w_sub(
                        crystal.weights[v], spec.simple_roots[i - 1]
                    )
                    assert crystal.e_action[tgt][i - 1] == v


# -- tensor words --------------------------------------------------------------


def letters_by_weight(crystal, *weights_):
    return word_from_weights(crystal, [weight(*w) for w in weights_])


def test_eps_phi_examples(c3, gl2):
    _, bc3 = c3
    w11 = letters_by_weight(bc3, (1, 0, 0), (1, 0, 0))
    assert all(tensor_eps_phi(w11, i) == (0, 2 if i == 1 else 0) for i in (1, 2, 3))
    _, bgl2 = gl2
    w21 = letters_by_weight(bgl2, (0, 1), (1, 0))
    assert tensor_eps_phi(w21, 1) == (1, 1)
    empty = word(bgl2, ())
    assert tensor_eps_phi(empty, 1) == (0, 0)
    assert is_highest(empty)


def test_weight_additivity(c3):
    _, crystal = c3
    w = letters_by_weight(crystal, (0, 1, 0), (0, 0, -1), (1, 0, 0))
    assert w.weight() == weight(1, 1, -1)


def test_apply_f_example_c3(c3):
    # The paper's B(w1)^{(x)2} table has the arrow 3 (x) 1 ->3 3bar (x) 1.
    _, crystal = c3
    w31 = letters_by_weight(crystal, (0, 0, 1), (1, 0, 0))
    lowered = apply_f(w31, 3)
    assert lowered is not None
    assert lowered.letters == letters_by_weight(crystal, (0, 0, -1), (1, 0, 0)).letters


def test_apply_e_example_c3(c3):
    _, crystal = c3
    w21 = letters_by_weight(crystal, (0, 1, 0), (1, 0, 0))
    raised = apply_e(w21, 1)
    assert raised.letters == letters_by_weight(crystal, (1, 0, 0), (1, 0, 0)).letters
    highest = letters_by_weight(crystal, (1, 0, 0), (1, 0, 0))
    assert all(apply_e(highest, i) is None for i in (1, 2, 3))


def test_inverse_operators(c2):
    _, crystal = c2
    rng = random.Random(3)
    for _ in range(60):
        letters = [rng.randrange(crystal.dim) for _ in range(5)]
        w = word(crystal, letters)
        for i in (1, 2):
            low = apply_f(w, i)
            if low is not None:
                assert apply_e(low, i).letters == w.letters
                assert low.weight() == w_sub(w.weight(), crystal.spec.simple_roots[i - 1])


def brute_force_highest_weights(w: TensorWord):
    """Oracle: raise by exhaustive BFS over all raising sequences."""
    spec = w.spec
    seen = {w.letters: w}
    frontier = [w]
    terminals = set()
    while frontier:
        nxt = []
        for cur in frontier:
            raised_any = False
            for i in range(1, spec.rank + 1):
                up = apply_e(cur, i)
                if up is not None:
                    raised_any = True
                    if up.letters not in seen:
                        seen[up.letters] = up
                        nxt.append(up)
            if not raised_any:
                terminals.add((cur.letters, cur.weight()))
        frontier = nxt
    return terminals


def test_pitman_examples(c3, gl2):
    _, bc3 = c3
    w21 = letters_by_weight(bc3, (0, 1, 0), (1, 0, 0))
    assert pitman_transform(w21).letters == letters_by_weight(
        bc3, (1, 0, 0), (1, 0, 0)
    ).letters
    _, bgl2 = gl2
    w212 = word(bgl2, (1, 0, 1))
    assert pitman_transform(w212).letters == (0, 0, 1)
    # Idempotence on any highest word.
    h = pitman_transform(w212)
    assert pitman_transform(h).letters == h.letters


def test_pitman_agrees_with_bfs_oracle(c2):
    _, crystal = c2
    rng = random.Random(7)
    for _ in range(40):
        letters = [rng.randrange(crystal.dim) for _ in range(5)]
        w = word(crystal, letters)
        result = pitman_transform(w)
        terminals = brute_force_highest_weights(w)
        # Confluence: every maximal raising sequence ends at the same vertex.
        assert terminals == {(result.letters, result.weight())}
        assert is_highest(result)
        assert crystal.spec.is_dominant(result.weight())


def test_is_highest_examples(c3):
    _, crystal = c3
    one = weight(1, 0, 0)
    assert is_highest(letters_by_weight(crystal, one, (0, 1, 0)))
    assert is_highest(letters_by_weight(crystal, one, (-1, 0, 0)))
    assert not is_highest(letters_by_weight(crystal, (0, 1, 0), one))


def test_highest_iff_prefix_rule(c2):
    """eps_i(word) = 0 <=> every prefix highest and last letter fits."""
    spec, crystal = c2
    for letters in itertools.product(range(crystal.dim), repeat=3):
        w = word(crystal, letters)
        prefix = w.prefix(len(letters) - 1)
        rule = is_highest(prefix) and all(
            crystal.eps[letters[-1]][i - 1] <= tensor_eps_phi(prefix, i)[1]
            for i in range(1, spec.rank + 1)
        )
        assert is_highest(w) == rule


def test_extract_component_examples(c3):
    spec, crystal = c3
    trivial = extract_component(letters_by_weight(crystal, (1, 0, 0), (-1, 0, 0)))
    assert trivial.dim == 1
    comp = extract_component(letters_by_weight(crystal, (1, 0, 0), (0, 1, 0)))
    assert comp.dim == 14  # dim V(w2) for C_3
    whole = extract_component(word(crystal, (0,)))
    assert whole.dim == crystal.dim
    assert Counter(whole.weights) == Counter(crystal.weights)


def test_extract_budget(c3):
    _, crystal = c3
    with pytest.raises(ResourceLimitError) as err:
        extract_component(word(crystal, (0, 0, 0)), vertex_budget=3)
    assert err.value.partial_count >= 3


def test_extract_requires_highest(c3):
    _, crystal = c3
    with pytest.raises(ValueError):
        extract_component(word(crystal, (1,)))


def test_decompose_examples(c3, gl2):
    _, bc3 = c3
    dec = decompose_tensor_power(bc3, 2)
    assert dec == {weight(2, 0, 0): 1, weight(1, 1, 0): 1, weight(0, 0, 0): 1}
    assert decompose_tensor_power(bc3, 1) == {weight(1, 0, 0): 1}
    _, bgl2 = gl2
    assert decompose_tensor_power(bgl2, 3) == {weight(3, 0): 1, weight(2, 1): 2}


def test_decompose_budget_directs_to_dp(c3):
    _, crystal = c3
    with pytest.raises(ResourceLimitError) as err:
        decompose_tensor_power(crystal, 5, word_budget=100)
    assert "path_count_dp" in str(err.value)


def test_component_count_identity(all_minuscule_systems):
    from crystalwalk import weyl_dimension

    for spec, crystal in all_minuscule_systems:
        for ell in (1, 2, 3):
            dec = decompose_tensor_power(crystal, ell)
            total = sum(mult * weyl_dimension(spec, lam) for lam, mult in dec.items())
            assert total == crystal.dim ** ell


# -- signature rule vs independent bracket cancellation ------------------------


def bracket_eps_phi(w: TensorWord, i: int):
    """Oracle: build the +/- string literally and cancel '+-' pairs."""
    symbols = []
    for crys, v in zip(w.factors, w.letters):
        symbols.extend(["-"] * crys.eps[v][i - 1])
        symbols.extend(["+"] * crys.phi[v][i - 1])
    changed = True
    while changed:
        changed = False
        for k in range(len(symbols) - 1):
            if symbols[k] == "+" and symbols[k + 1] == "-":
                del symbols[k : k + 2]
                changed = True
                break
    return symbols.count("-"), symbols.count("+")


@given(data=st.data())
@settings(max_examples=60, deadline=None)
def test_fold_matches_bracket_cancellation(data):
    spec = build_root_system("C", 2)
    crystal = minuscule_crystal(spec, spec.fundamental(1))
    length = data.draw(st.integers(min_value=0, max_value=8))
    letters = data.draw(
        st.lists(
            st.integers(min_value=0, max_value=crystal.dim - 1),
            min_size=length,
            max_size=length,
        )
    )
    w = word(crystal, letters)
    for i in (1, 2):
        eps, phi = tensor_eps_phi(w, i)
        assert (eps, phi) == bracket_eps_phi(w, i)
        pair = spec.pairing(w.weight(), i)
        assert phi - eps == pair


def test_prefix_property_exhaustive(all_minuscule_systems):
    """Every prefix of a highest word is highest (Lem_HWV style), ell <= 5."""
    for spec, crystal in all_minuscule_systems:
        ell = 5 if crystal.dim ** 5 <= 40000 else 4
        for letters, eps, _, _ in iter_words_with_state(crystal, ell):
            if any(eps):
                continue
            w = word(crystal, letters)
            for k in range(1, ell):
                assert is_highest(w.prefix(k))


def test_minuscule_path_bijection(all_minuscule_systems):
    """Highest <=> all prefix weights dominant, exhaustively for ell <= 4."""
    for spec, crystal in all_minuscule_systems:
        ell = 4
        for letters in itertools.product(range(crystal.dim), repeat=ell):
            w = word(crystal, letters)
            prefixes_dominant = True
            acc = spec.zero()
            for v in letters:
                acc = w_add(acc, crystal.weights[v])
                if not spec.is_dominant(acc):
                    prefixes_dominant = False
                    break
            assert is_highest(w) == prefixes_dominant


def test_bijection_fails_for_non_minuscule():
    """B_2, delta = omega_1 (extracted): a dominant-prefix word that is not
    highest exists (the zero-weight letter)."""
    from crystalwalk.counting import component_crystal

    spec = build_root_system("B", 2)
    spin = minuscule_crystal(spec, spec.fundamental(2))
    vec = component_crystal(spin, spec.fundamental(1))
    assert vec.dim == 5
    zero_vertex = vec.vertex_by_weight[spec.zero()]
    w = word(vec, (zero_vertex,))
    assert spec.is_dominant(w.weight())      # the one-step path stays dominant
    assert not is_highest(w)                 # but the word is not highest


def test_pitman_confluence_random_orders(c3):
    _, crystal = c3
    rng = random.Random(5)
    for _ in range(30):
        letters = [rng.randrange(crystal.dim) for _ in range(4)]
        w = word(crystal, letters)
        target = pitman_transform(w).weight()
        for _ in range(5):
            cur = w
            while True:
                options = [i for i in (1, 2, 3) if apply_e(cur, i) is not None]
                if not options:
                    break
                cur = apply_e(cur, rng.choice(options))
            assert cur.weight() == target
