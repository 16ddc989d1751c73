"""Crystal graphs: minuscule crystals, tensor words, the Pitman transform.

A ``Crystal`` is a finite colored graph stored as flat per-vertex tables
(weight, eps_i, phi_i, raising/lowering targets).  Minuscule crystals are
built directly on the Weyl orbit of the highest weight; every other
crystal used here is materialized as the connected component of a highest
tensor word (``extract_component``) or as a direct sum of components.

Tensor words follow the product rule

    phi_i(u (x) v) = phi_i(v) + max(phi_i(u) - eps_i(v), 0)
    eps_i(u (x) v) = eps_i(u) + max(eps_i(v) - phi_i(u), 0)

with lowering acting on the left factor exactly when
phi_i(u) > eps_i(v).  Operationally this is the signature rule: write
"-"^eps "+"^phi per letter, cancel "+-" pairs, then raise at the
rightmost surviving "-" and lower at the leftmost surviving "+".
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import cached_property

from .errors import NotMinusculeError, ResourceLimitError
from .rootsystem import (
    RootSystemSpec,
    Weight,
    format_weight,
    is_minuscule,
    minuscule_indices,
    w_add,
    w_sub,
    w_zero,
)

DEFAULT_WORD_BUDGET = 10_000_000
DEFAULT_VERTEX_BUDGET = 200_000


@dataclass(frozen=True, eq=False)
class Crystal:
    """Finite crystal graph with O(1) per-vertex lookups.

    Identity-based equality: crystals are built once per (spec, delta)
    and shared, so ``is`` comparison is the intended semantics.
    """

    spec: RootSystemSpec
    weights: tuple[Weight, ...]
    eps: tuple[tuple[int, ...], ...]
    phi: tuple[tuple[int, ...], ...]
    f_action: tuple[tuple[int | None, ...], ...]
    e_action: tuple[tuple[int | None, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.weights)

    @cached_property
    def highest_vertices(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.dim) if not any(self.eps[v]))

    @cached_property
    def weight_multiplicities(self) -> dict[Weight, int]:
        return dict(Counter(self.weights))

    @cached_property
    def vertex_by_weight(self) -> dict[Weight, int]:
        """Weight -> vertex map; only meaningful when all multiplicities are 1."""
        return {w: v for v, w in enumerate(self.weights)}

    def multiplicity(self, beta: Weight) -> int:
        return self.weight_multiplicities.get(beta, 0)


@dataclass(frozen=True, eq=False)
class ExtractedCrystal(Crystal):
    """Connected component of a tensor power, materialized by BFS."""

    highest_word: "TensorWord" = None
    words: tuple["TensorWord", ...] = ()


_MINUSCULE_CACHE: dict[tuple[RootSystemSpec, Weight], Crystal] = {}


def minuscule_crystal(spec: RootSystemSpec, delta: Weight) -> Crystal:
    """Crystal of the minuscule representation with highest weight ``delta``.

    Vertices are the Weyl orbit of ``delta``; since every i-string has
    length <= 1, the lowering operator f_i is defined exactly on vertices
    with <wt, alpha_i^vee> = 1 and sends them to the unique vertex of
    weight wt - alpha_i.  Results are cached per (spec, delta) and shared.
    """
    cached = _MINUSCULE_CACHE.get((spec, delta))
    if cached is not None:
        return cached
    if not is_minuscule(spec, delta):
        allowed = ", ".join(
            f"w{k}={format_weight(spec.fundamental(k))}" for k in minuscule_indices(spec)
        )
        raise NotMinusculeError(
            f"{format_weight(delta)} is not minuscule for type "
            f"{spec.cartan_type}{spec.rank}; minuscule highest weights are: {allowed}"
        )
    orbit = sorted(spec.weyl_orbit(delta), reverse=True)
    index = {w: v for v, w in enumerate(orbit)}
    n = spec.rank
    eps_rows, phi_rows, f_rows, e_rows = [], [], [], []
    for w in orbit:
        eps_row, phi_row, f_row, e_row = [], [], [], []
        for i in range(1, n + 1):
            p = spec.pairing(w, i)
            if p not in (-1, 0, 1):
                raise NotMinusculeError(
                    f"orbit weight {format_weight(w)} has pairing {p} with alpha_{i}; "
                    f"{format_weight(delta)} cannot be minuscule"
                )
            eps_row.append(1 if p == -1 else 0)
            phi_row.append(1 if p == 1 else 0)
            f_row.append(index[w_sub(w, spec.simple_roots[i - 1])] if p == 1 else None)
            e_row.append(index[w_add(w, spec.simple_roots[i - 1])] if p == -1 else None)
        eps_rows.append(tuple(eps_row))
        phi_rows.append(tuple(phi_row))
        f_rows.append(tuple(f_row))
        e_rows.append(tuple(e_row))
    crystal = Crystal(
        spec=spec,
        weights=tuple(orbit),
        eps=tuple(eps_rows),
        phi=tuple(phi_rows),
        f_action=tuple(f_rows),
        e_action=tuple(e_rows),
    )
    assert len(crystal.highest_vertices) == 1
    assert crystal.weights[crystal.highest_vertices[0]] == delta
    _MINUSCULE_CACHE[(spec, delta)] = crystal
    return crystal


def direct_sum(components: tuple[Crystal, ...] | list[Crystal]) -> Crystal:
    """Disjoint union of crystals over one root system (non-irreducible B(M))."""
    components = tuple(components)
    spec = components[0].spec
    if any(c.spec != spec for c in components):
        raise ValueError("direct_sum needs components over the same root system")
    weights, eps, phi, f_rows, e_rows = [], [], [], [], []
    offset = 0
    for comp in components:
        weights.extend(comp.weights)
        eps.extend(comp.eps)
        phi.extend(comp.phi)
        for row in comp.f_action:
            f_rows.append(tuple(None if t is None else t + offset for t in row))
        for row in comp.e_action:
            e_rows.append(tuple(None if t is None else t + offset for t in row))
        offset += comp.dim
    return Crystal(
        spec=spec,
        weights=tuple(weights),
        eps=tuple(eps),
        phi=tuple(phi),
        f_action=tuple(f_rows),
        e_action=tuple(e_rows),
    )


@dataclass(frozen=True)
class TensorWord:
    """A vertex a_1 (x) ... (x) a_l of a tensor product of crystals.

    ``factors[k]`` is the crystal the k-th letter lives in; the empty word
    (l = 0) is allowed and is highest of weight 0.
    """

    spec: RootSystemSpec
    factors: tuple[Crystal, ...]
    letters: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.letters)

    def weight(self) -> Weight:
        total = w_zero(self.spec.ambient_dim)
        for crys, v in zip(self.factors, self.letters):
            total = w_add(total, crys.weights[v])
        return total

    def prefix(self, k: int) -> "TensorWord":
        return TensorWord(self.spec, self.factors[:k], self.letters[:k])

    def append(self, crystal: Crystal, vertex: int) -> "TensorWord":
        return TensorWord(self.spec, self.factors + (crystal,), self.letters + (vertex,))


def word(crystal: Crystal, letters) -> TensorWord:
    """Homogeneous word in B(delta)^{(x) l} from vertex ids."""
    letters = tuple(letters)
    return TensorWord(crystal.spec, (crystal,) * len(letters), letters)


def word_from_weights(crystal: Crystal, steps) -> TensorWord:
    """Word from a sequence of letter weights (multiplicity-one crystals only)."""
    ids = tuple(crystal.vertex_by_weight[w] for w in steps)
    return word(crystal, ids)


def tensor_eps_phi(w: TensorWord, i: int) -> tuple[int, int]:
    """(eps_i, phi_i) of the word by the left fold of the product rule."""
    i0 = i - 1
    eps = phi = 0
    for crys, v in zip(w.factors, w.letters):
        le, lp = crys.eps[v][i0], crys.phi[v][i0]
        eps += le - phi if le > phi else 0
        phi = lp + (phi - le if phi > le else 0)
    return eps, phi


def is_highest(w: TensorWord) -> bool:
    return all(tensor_eps_phi(w, i)[0] == 0 for i in range(1, w.spec.rank + 1))


def _signature(w: TensorWord, i: int) -> tuple[list[int], list[int]]:
    """Positions of unmatched '+' (stack, leftmost first) and '-' (increasing)."""
    i0 = i - 1
    plus: list[int] = []
    minus: list[int] = []
    for k, (crys, v) in enumerate(zip(w.factors, w.letters)):
        e = crys.eps[v][i0]
        while e and plus:
            plus.pop()
            e -= 1
        if e:
            minus.extend([k] * e)
        p = crys.phi[v][i0]
        if p:
            plus.extend([k] * p)
    return plus, minus


def _replace_letter(w: TensorWord, k: int, vertex: int) -> TensorWord:
    letters = w.letters[:k] + (vertex,) + w.letters[k + 1:]
    return TensorWord(w.spec, w.factors, letters)


def apply_e(w: TensorWord, i: int) -> TensorWord | None:
    """Raising operator on the word; None when eps_i = 0."""
    _, minus = _signature(w, i)
    if not minus:
        return None
    k = minus[-1]
    target = w.factors[k].e_action[w.letters[k]][i - 1]
    assert target is not None
    return _replace_letter(w, k, target)


def apply_f(w: TensorWord, i: int) -> TensorWord | None:
    """Lowering operator on the word; None when phi_i = 0."""
    plus, _ = _signature(w, i)
    if not plus:
        return None
    k = plus[0]
    target = w.factors[k].f_action[w.letters[k]][i - 1]
    assert target is not None
    return _replace_letter(w, k, target)


def pitman_transform(w: TensorWord) -> TensorWord:
    """Highest-weight vertex of the connected component containing ``w``.

    Scans i = 1..rank and applies raising operators until every eps_i
    vanishes; termination is guaranteed because each raise adds a simple
    root to the weight, which is bounded above in the dominance order.
    """
    n = w.spec.rank
    cur = w
    while True:
        for i in range(1, n + 1):
            raised = apply_e(cur, i)
            if raised is not None:
                cur = raised
                break
        else:
            return cur


def extract_component(
    highest_word: TensorWord, vertex_budget: int = DEFAULT_VERTEX_BUDGET
) -> ExtractedCrystal:
    """Materialize the connected component below a highest word by BFS."""
    if not is_highest(highest_word):
        raise ValueError("extract_component requires a highest-weight word")
    spec = highest_word.spec
    n = spec.rank
    index: dict[tuple[int, ...], int] = {highest_word.letters: 0}
    words: list[TensorWord] = [highest_word]
    f_rows: list[list[int | None]] = []
    queue = [highest_word]
    head = 0
    while head < len(queue):
        cur = queue[head]
        head += 1
        row: list[int | None] = []
        for i in range(1, n + 1):
            low = apply_f(cur, i)
            if low is None:
                row.append(None)
                continue
            key = low.letters
            tgt = index.get(key)
            if tgt is None:
                if len(words) >= vertex_budget:
                    raise ResourceLimitError(
                        f"component extraction exceeded the vertex budget "
                        f"{vertex_budget} (partial count {len(words)})",
                        partial_count=len(words),
                    )
                tgt = len(words)
                index[key] = tgt
                words.append(low)
                queue.append(low)
            row.append(tgt)
        f_rows.append(row)

    dim = len(words)
    e_rows: list[list[int | None]] = [[None] * n for _ in range(dim)]
    for v, row in enumerate(f_rows):
        for i0, tgt in enumerate(row):
            if tgt is not None:
                e_rows[tgt][i0] = v
    eps_rows, phi_rows = [], []
    for wv in words:
        pairs = [tensor_eps_phi(wv, i) for i in range(1, n + 1)]
        eps_rows.append(tuple(p[0] for p in pairs))
        phi_rows.append(tuple(p[1] for p in pairs))
    return ExtractedCrystal(
        spec=spec,
        weights=tuple(wv.weight() for wv in words),
        eps=tuple(eps_rows),
        phi=tuple(phi_rows),
        f_action=tuple(tuple(row) for row in f_rows),
        e_action=tuple(tuple(row) for row in e_rows),
        highest_word=highest_word,
        words=tuple(words),
    )


def iter_words_with_state(crystal: Crystal, ell: int, start_phi=None):
    """DFS over all words of B(delta)^{(x) ell}, yielding fold state at leaves.

    Yields ``(letters, eps, phi, wt)`` where eps/phi are the fold values of
    the full word and wt its weight.  ``start_phi`` seeds the fold with the
    phi-vector of a virtual highest prefix (used for words b_mu (x) b).
    """
    spec = crystal.spec
    n = spec.rank
    dim = crystal.dim
    zero = w_zero(spec.ambient_dim)
    eps0 = (0,) * n
    phi0 = tuple(start_phi) if start_phi is not None else (0,) * n
    if ell == 0:
        yield tuple(), eps0, phi0, zero
        return
    # Iterative DFS with one fold state per depth, so prefixes fold once.
    letters: list[int] = []
    pending: list[list[int]] = [list(range(dim - 1, -1, -1))]
    states: list[tuple] = [(eps0, phi0, zero)]
    while pending:
        choices = pending[-1]
        if not choices:
            pending.pop()
            states.pop()
            if letters:
                letters.pop()
            continue
        v = choices.pop()
        eps, phi, wt = _fold_step(crystal, *states[-1], v)
        letters.append(v)
        if len(letters) == ell:
            yield tuple(letters), eps, phi, wt
            letters.pop()
        else:
            pending.append(list(range(dim - 1, -1, -1)))
            states.append((eps, phi, wt))


def _fold_step(crystal: Crystal, eps, phi, wt, v):
    le, lp = crystal.eps[v], crystal.phi[v]
    new_eps = tuple(
        e + (a - p if a > p else 0) for e, p, a in zip(eps, phi, le)
    )
    new_phi = tuple(
        b + (p - a if p > a else 0) for p, a, b in zip(phi, le, lp)
    )
    return new_eps, new_phi, w_add(wt, crystal.weights[v])


def decompose_tensor_power(
    crystal: Crystal, ell: int, word_budget: int = DEFAULT_WORD_BUDGET
) -> Counter:
    """Multiset of highest weights of B(delta)^{(x) ell} by full enumeration.

    The multiplicity of lambda is the number of highest words of weight
    lambda.  Exceeds ``word_budget`` words -> ResourceLimitError pointing
    at the DP route (counting.path_count_dp).
    """
    total = crystal.dim ** ell
    if total > word_budget:
        raise ResourceLimitError(
            f"{crystal.dim}^{ell} = {total} words exceed the enumeration budget "
            f"{word_budget}; use counting.path_count_dp instead"
        )
    out: Counter = Counter()
    for _, eps, _, wt in iter_words_with_state(crystal, ell):
        if not any(eps):
            out[wt] += 1
    return out
