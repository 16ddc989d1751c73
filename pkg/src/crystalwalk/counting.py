"""Exact big-integer counting: weight/tensor multiplicities and path DP.

The dominant-path recursion

    f^{l+1}_{lambda/mu} = sum over steps beta in wt(B(delta)) with
                          lambda - beta dominant of f^l_{lambda-beta/mu}

counts paths from mu that never leave the closed Weyl chamber; for
minuscule delta these are exactly the highest words of B(delta)^{(x) l},
so the table gives the outer multiplicities f^l_{lambda/mu,delta}.

States are stored as doubled-integer tuples (2*coordinates) so the inner
loop stays on plain ints even for spin weights.  Full rows are retained
up to ``keep_limit``; deeper rows are served by streaming passes that
record counts only at registered target weights (the tables grow like
dim^l, but the asymptotic checks only ever query a handful of points).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .crystal import (
    Crystal,
    ExtractedCrystal,
    TensorWord,
    extract_component,
    is_highest,
    iter_words_with_state,
    word,
)
from .errors import ResourceLimitError
from .rootsystem import RootSystemSpec, Weight, format_weight, w_add, w_scale, w_sub

DEFAULT_KEEP_LIMIT = 64


def _scaled_steps(spec: RootSystemSpec, crystal: Crystal) -> tuple[tuple[int, ...], ...]:
    distinct = sorted(set(crystal.weights), reverse=True)
    return tuple(spec.scaled(w) for w in distinct)


def _row_step_generic(cur: dict, steps, ok) -> dict:
    nxt: dict = {}
    get = nxt.get
    for state, cnt in cur.items():
        for st in steps:
            ns = tuple(a + b for a, b in zip(state, st))
            if ok(ns):
                nxt[ns] = get(ns, 0) + cnt
    return nxt


def _make_row_step(ctype: str, dim: int, steps):
    """Specialized row update for 2-dimensional ambient spaces (the hot path)."""
    if dim != 2:
        return None
    steps2 = tuple((s[0], s[1]) for s in steps)
    if ctype == "A":
        def step_row(cur):
            nxt: dict = {}
            get = nxt.get
            for (s0, s1), cnt in cur.items():
                for d0, d1 in steps2:
                    a = s0 + d0
                    b = s1 + d1
                    if a >= b:
                        key = (a, b)
                        nxt[key] = get(key, 0) + cnt
            return nxt
    elif ctype in ("B", "C"):
        def step_row(cur):
            nxt: dict = {}
            get = nxt.get
            for (s0, s1), cnt in cur.items():
                for d0, d1 in steps2:
                    a = s0 + d0
                    b = s1 + d1
                    if a >= b >= 0:
                        key = (a, b)
                        nxt[key] = get(key, 0) + cnt
            return nxt
    else:  # D_2
        def step_row(cur):
            nxt: dict = {}
            get = nxt.get
            for (s0, s1), cnt in cur.items():
                for d0, d1 in steps2:
                    a = s0 + d0
                    b = s1 + d1
                    if a >= b and a >= -b:
                        key = (a, b)
                        nxt[key] = get(key, 0) + cnt
            return nxt
    return step_row


@dataclass(eq=False)
class DominantCountTable:
    """Rows of f^l_{lambda/mu} over dominant weights, exact integers.

    ``rows[l]`` maps scaled weights to counts for l <= keep_limit; deeper
    values come from ``trace`` passes that keep only two live rows.
    """

    spec: RootSystemSpec
    crystal: Crystal
    mu: Weight
    keep_limit: int = DEFAULT_KEEP_LIMIT
    rows: list[dict] = field(default_factory=list)
    _traces: dict[tuple[int, ...], list[int]] = field(default_factory=dict)
    _trace_len: int = 0
    _frontier: tuple[int, dict] | None = None

    def __post_init__(self):
        if not self.spec.is_dominant(self.mu):
            raise ValueError(f"starting weight {format_weight(self.mu)} must be dominant")
        self._steps = _scaled_steps(self.spec, self.crystal)
        self._ok = self.spec.scaled_dominance_checker()
        self._fast = _make_row_step(self.spec.cartan_type, self.spec.ambient_dim, self._steps)
        if not self.rows:
            self.rows.append({self.spec.scaled(self.mu): 1})

    def _advance(self, cur: dict) -> dict:
        if self._fast is not None:
            return self._fast(cur)
        return _row_step_generic(cur, self._steps, self._ok)

    def ensure_rows(self, upto: int) -> None:
        """Materialize full rows 0..upto (bounded by keep_limit)."""
        if upto > self.keep_limit:
            raise ValueError(
                f"full rows are only kept up to {self.keep_limit}; "
                "use trace()/count() for deeper levels"
            )
        while len(self.rows) <= upto:
            self.rows.append(self._advance(self.rows[-1]))

    def row(self, ell: int) -> dict[Weight, int]:
        """Row ell as a Weight-keyed dict."""
        self.ensure_rows(ell)
        return {self.spec.unscaled(k): v for k, v in self.rows[ell].items()}

    def trace(self, targets, upto: int) -> None:
        """Record f^l at each target weight for all l <= upto.

        Re-tracing with the same target set resumes from the saved
        frontier row, so adaptive callers that grow ``upto`` pay a single
        forward pass overall; new targets force a restart from row 0.
        """
        keys = [self.spec.scaled(t) for t in targets]
        new = [k for k in keys if k not in self._traces]
        if not new and self._trace_len > upto:
            return
        # Invariant: every trace list has length _trace_len and _frontier
        # holds the row at index _trace_len - 1.
        if new or self._frontier is None:
            for k in new:
                self._traces[k] = []
            all_keys = list(self._traces.keys())
            for k in all_keys:
                self._traces[k] = []
            cur = self.rows[0]
            for k in all_keys:
                self._traces[k].append(cur.get(k, 0))
            self._trace_len = 1
            start = 1
        else:
            all_keys = list(self._traces.keys())
            start_ell, cur = self._frontier
            start = start_ell + 1
        for ell in range(start, upto + 1):
            if ell < len(self.rows):
                cur = self.rows[ell]
            else:
                cur = self._advance(cur)
                if ell <= self.keep_limit:
                    self.rows.append(cur)
            for k in all_keys:
                self._traces[k].append(cur.get(k, 0))
        self._trace_len = upto + 1
        self._frontier = (upto, cur)

    def count(self, ell: int, lam: Weight) -> int:
        """f^ell_{lam/mu}, exact."""
        if ell <= self.keep_limit:
            self.ensure_rows(ell)
            return self.rows[ell].get(self.spec.scaled(lam), 0)
        key = self.spec.scaled(lam)
        if key not in self._traces or self._trace_len <= ell:
            self.trace([lam], ell)
        return self._traces[key][ell]

    def counts_along(self, lam: Weight, upto: int) -> list[int]:
        """[f^0_lam, ..., f^upto_lam] via the trace machinery."""
        key = self.spec.scaled(lam)
        if key not in self._traces or self._trace_len <= upto:
            self.trace([lam], upto)
        return self._traces[key][: upto + 1]


_TABLE_CACHE: dict[tuple[int, Weight], DominantCountTable] = {}


def get_table(crystal: Crystal, mu: Weight) -> DominantCountTable:
    key = (id(crystal), mu)
    table = _TABLE_CACHE.get(key)
    if table is None:
        table = DominantCountTable(spec=crystal.spec, crystal=crystal, mu=mu)
        _TABLE_CACHE[key] = table
    return table


def path_count_dp(
    spec: RootSystemSpec, crystal: Crystal, mu: Weight, L: int
) -> DominantCountTable:
    """Dominant-path DP table from mu with steps wt(B(delta)), rows 0..L.

    For minuscule delta the row values are the outer multiplicities
    f^l_{lambda/mu,delta}; for non-minuscule delta they count dominant
    paths only (the highest-word bijection fails there) and must not be
    read as tensor multiplicities.
    """
    table = get_table(crystal, mu)
    table.ensure_rows(min(L, table.keep_limit))
    return table


def brute_force_count(
    crystal: Crystal, mu: Weight, ell: int, word_budget: int = 10_000_000
) -> dict[Weight, int]:
    """Oracle for the DP: enumerate all dim^ell words, test highestness.

    Counts words b such that b_mu (x) b is a highest word of
    B(mu) (x) B(delta)^{(x) ell}, via the tensor fold seeded with the
    eps/phi profile of the highest vertex b_mu (eps = 0,
    phi_i = <mu, alpha_i^vee>).  Returns weight -> count with weights
    including the mu offset.
    """
    spec = crystal.spec
    if not spec.is_dominant(mu):
        raise ValueError("mu must be dominant")
    total = crystal.dim ** ell
    if total > word_budget:
        raise ResourceLimitError(
            f"{crystal.dim}^{ell} = {total} words exceed the budget {word_budget}"
        )
    start_phi = tuple(int(spec.pairing(mu, i)) for i in range(1, spec.rank + 1))
    out: dict[Weight, int] = {}
    for _, eps, _, wt in iter_words_with_state(crystal, ell, start_phi=start_phi):
        if not any(eps):
            lam = w_add(mu, wt)
            out[lam] = out.get(lam, 0) + 1
    return out


# -- components of tensor powers --------------------------------------------


def highest_word_of_weight(crystal: Crystal, lam: Weight, max_length: int = 256) -> TensorWord:
    """A highest word of weight lam in some power B(delta)^{(x) l}.

    Uses the dominant-path correspondence, so ``crystal`` must be
    minuscule (weights multiplicity-free and dominant prefixes <=>
    highest); the result is verified and a ValueError raised otherwise.
    """
    spec = crystal.spec
    if len(set(crystal.weights)) != crystal.dim:
        raise ValueError("highest_word_of_weight needs a multiplicity-free crystal")
    target = spec.scaled(lam)
    start = spec.scaled(spec.zero())
    if target == start:
        return word(crystal, ())
    ok = spec.scaled_dominance_checker()
    steps = [(spec.scaled(w), v) for v, w in enumerate(crystal.weights)]
    parent: dict[tuple[int, ...], tuple[tuple[int, ...], int]] = {start: None}
    frontier = [start]
    for _ in range(max_length):
        nxt = []
        for state in frontier:
            for st, v in steps:
                ns = tuple(a + b for a, b in zip(state, st))
                if ns not in parent and ok(ns):
                    parent[ns] = (state, v)
                    if ns == target:
                        letters = []
                        cur = ns
                        while parent[cur] is not None:
                            prev, vv = parent[cur]
                            letters.append(vv)
                            cur = prev
                        w = word(crystal, tuple(reversed(letters)))
                        if not is_highest(w):
                            raise ValueError(
                                "dominant path is not a highest word; "
                                "is the crystal minuscule?"
                            )
                        return w
                    nxt.append(ns)
        frontier = nxt
        if not frontier:
            break
    raise ValueError(
        f"{format_weight(lam)} is not reachable by dominant paths within "
        f"{max_length} steps"
    )


_COMPONENT_CACHE: dict[tuple[int, Weight], ExtractedCrystal] = {}


def component_crystal(
    crystal: Crystal, lam: Weight, vertex_budget: int = 200_000
) -> ExtractedCrystal:
    """Extracted realization of B(lambda) over tensor powers of ``crystal``."""
    key = (id(crystal), lam)
    comp = _COMPONENT_CACHE.get(key)
    if comp is None:
        hw = highest_word_of_weight(crystal, lam)
        comp = extract_component(hw, vertex_budget=vertex_budget)
        _COMPONENT_CACHE[key] = comp
    return comp


def weight_multiplicity(crystal: Crystal, lam: Weight, beta: Weight) -> int:
    """K_{lambda,beta} = number of vertices of weight beta in B(lambda)."""
    comp = component_crystal(crystal, lam)
    return comp.multiplicity(beta)


def tensor_multiplicity(
    spec: RootSystemSpec, mu: Weight, delta_crystal: Crystal, lam: Weight
) -> int:
    """m^lambda_{mu,delta}: multiplicity of V(lambda) in V(mu) (x) V(delta).

    Counts vertices b of B(delta) with wt(b) = lambda - mu and
    eps_i(b) <= <mu, alpha_i^vee> for all i (the highest words of the
    product are exactly b_mu (x) such b).
    """
    if not spec.is_dominant(lam):
        return 0
    target = w_sub(lam, mu)
    cap = tuple(int(spec.pairing(mu, i)) for i in range(1, spec.rank + 1))
    count = 0
    for v, wv in enumerate(delta_crystal.weights):
        if wv == target and all(e <= c for e, c in zip(delta_crystal.eps[v], cap)):
            count += 1
    return count


# -- paper identities as exact checks ----------------------------------------


def verify_identity_lemma(
    spec: RootSystemSpec, delta_crystal: Crystal, mu: Weight, beta: Weight
) -> tuple[bool, int, int]:
    """sum_lambda m^lambda_{mu,delta} K_{lambda,beta}
       = sum_gamma K_{mu,gamma} K_{delta,beta-gamma}, exact integers."""
    candidates = {w_add(mu, wv) for wv in set(delta_crystal.weights)}
    lhs = 0
    for lam in candidates:
        if not spec.is_dominant(lam):
            continue
        m = tensor_multiplicity(spec, mu, delta_crystal, lam)
        if m:
            lhs += m * weight_multiplicity(delta_crystal, lam, beta)
    mu_comp = component_crystal(delta_crystal, mu)
    rhs = 0
    for gamma, k_mu in mu_comp.weight_multiplicities.items():
        rhs += k_mu * delta_crystal.multiplicity(w_sub(beta, gamma))
    return lhs == rhs, lhs, rhs


def verify_skew_decomposition(
    spec: RootSystemSpec,
    delta_crystal: Crystal,
    mu: Weight,
    lam: Weight,
    ell: int,
) -> dict:
    """f^l_{lam/mu} = sum_kappa f^l_kappa m^lam_{kappa,mu} (always), and the
    coefficient form sum_gamma f^l_{lam-gamma} K_{mu,gamma} (lam deep only).

    Returns the three exact integers plus equality flags.
    """
    table_mu = get_table(delta_crystal, mu)
    table_0 = get_table(delta_crystal, spec.zero())
    lhs = table_mu.count(ell, lam)
    mu_comp = component_crystal(delta_crystal, mu)
    row0 = table_0.row(ell)
    rhs_mult = 0
    for kappa, f_k in row0.items():
        m = tensor_multiplicity(spec, kappa, mu_comp, lam)
        if m:
            rhs_mult += f_k * m
    rhs_coef = 0
    for gamma, k_mu in mu_comp.weight_multiplicities.items():
        rhs_coef += k_mu * table_0.count(ell, w_sub(lam, gamma))
    return {
        "lhs": lhs,
        "rhs_multiplicity_form": rhs_mult,
        "rhs_coefficient_form": rhs_coef,
        "multiplicity_form_holds": lhs == rhs_mult,
        "coefficient_form_holds": lhs == rhs_coef,
    }


def skew_equality_onset(
    spec: RootSystemSpec,
    delta_crystal: Crystal,
    mu: Weight,
    kappa: Weight,
    drift,
    a_values,
) -> int | None:
    """Smallest a in a_values from which m^{lam(a)}_{kappa,mu} = K_{mu,lam(a)-kappa}
    holds (and keeps holding); None if it never stabilizes in the range."""
    mu_comp = component_crystal(delta_crystal, mu)
    onset = None
    for a in a_values:
        lam = spec.dominant_representative(round_to_weight_lattice(spec, [a * v for v in drift]))
        m = tensor_multiplicity(spec, kappa, mu_comp, lam)
        k = mu_comp.multiplicity(w_sub(lam, kappa))
        if m == k:
            if onset is None:
                onset = a
        else:
            onset = None
    return onset


def mass_conservation(
    spec: RootSystemSpec, delta_crystal: Crystal, ell: int, dims: dict[Weight, int]
) -> tuple[int, int]:
    """(sum_lambda f^l_lambda dim V(lambda), dim V(delta)^l) as exact ints."""
    table = get_table(delta_crystal, spec.zero())
    row = table.row(ell)
    total = sum(cnt * dims[lam] for lam, cnt in row.items())
    return total, delta_crystal.dim ** ell


# -- drift-direction lattice discretization ----------------------------------


def round_to_weight_lattice(spec: RootSystemSpec, vec) -> Weight:
    """Nearest integer-coordinate point of P (no step-coset constraint)."""
    return tuple(Fraction(round(float(v))) for v in vec)


def lattice_round(spec: RootSystemSpec, vec, ell: int, delta: Weight) -> Weight:
    """Nearest weight to ``vec`` in the coset ell*delta + Q.

    Coordinates are rounded to the coset anchor; types A, C, D then repair
    the coset's linear/parity constraint (type A: coordinate sum is
    conserved; C, D: the root lattice has even coordinate sum) by
    adjusting the entries with the largest rounding slack.
    """
    base = w_scale(ell, delta)
    diff = [float(v) - float(b) for v, b in zip(vec, base)]
    r = [round(d) for d in diff]
    ctype = spec.cartan_type
    if ctype == "A":
        need = -sum(r)  # target: sum(r) == 0
    elif ctype in ("C", "D"):
        need = 0
        if sum(r) % 2:  # target: even sum; adjust by one step
            need = 1 if sum(d - rr for d, rr in zip(diff, r)) >= 0 else -1
    else:
        need = 0
    while need != 0:
        step = 1 if need > 0 else -1
        # Adjust the coordinate whose rounding slack best absorbs the step.
        j = max(range(len(r)), key=lambda k: (diff[k] - r[k]) * step)
        r[j] += step
        need -= step
    return w_add(base, tuple(Fraction(v) for v in r))
