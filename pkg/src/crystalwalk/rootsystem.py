"""Classical root-system data (types A, B, C, D) and Weyl-group operations.

Weights are tuples of ``Fraction`` in the ambient coordinates on the
standard basis; all arithmetic is exact.  Type A is modelled over
``gl_{rank+1}``: the ambient dimension is ``rank + 1`` and weights are
integer vectors of that length.  For B and D, spin weights have
half-integer coordinates, hence the Fraction representation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ResourceLimitError, UnsupportedTypeError

Weight = tuple[Fraction, ...]

#: Weyl group element: coordinate i of w.v is signs[i] * v[perm[i]].
WeylElement = tuple[tuple[int, ...], tuple[int, ...], int]

DEFAULT_WEYL_RANK_BOUND = 8

_HALF = Fraction(1, 2)


def weight(*coords) -> Weight:
    """Build a Weight from ints/Fractions/strings like '1/2'."""
    return tuple(Fraction(c) for c in coords)


def w_add(a: Weight, b: Weight) -> Weight:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def w_sub(a: Weight, b: Weight) -> Weight:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def w_scale(c, a: Weight) -> Weight:
    c = Fraction(c)
    return tuple(c * x for x in a)


def w_zero(dim: int) -> Weight:
    return (Fraction(0),) * dim


def w_dot(a: Weight, b: Weight) -> Fraction:
    return sum((x * y for x, y in zip(a, b, strict=True)), Fraction(0))


def format_weight(a: Weight) -> str:
    """Exact comma-separated rendering, e.g. ``1/2,1/2,-1/2``."""
    return ",".join(str(c) for c in a)


def parse_weight(text: str) -> Weight:
    return tuple(Fraction(part.strip()) for part in text.split(","))


def apply_weyl(w: WeylElement, v: Weight) -> Weight:
    perm, signs, _ = w
    return tuple(signs[i] * v[perm[i]] for i in range(len(perm)))


@dataclass(frozen=True)
class RootSystemSpec:
    """Immutable root-system data for one classical type and rank.

    ``rank`` counts simple roots; for type A the ambient space is
    ``gl_{rank+1}`` so ``ambient_dim == rank + 1``, otherwise
    ``ambient_dim == rank``.
    """

    cartan_type: str
    rank: int
    ambient_dim: int
    simple_roots: tuple[Weight, ...]
    positive_roots: tuple[Weight, ...]
    fundamental_weights: tuple[Weight, ...]
    rho: Weight
    weyl_elements: tuple[WeylElement, ...] = field(repr=False)
    #: integer coefficients of the coroot pairing <., alpha_i^vee> per simple root
    coroot_forms: tuple[tuple[int, ...], ...] = field(repr=False)
    #: expansion of each positive root on the simple roots (integer coefficients)
    positive_root_coords: tuple[tuple[int, ...], ...] = field(repr=False)

    def __eq__(self, other):
        if not isinstance(other, RootSystemSpec):
            return NotImplemented
        return (self.cartan_type, self.rank) == (other.cartan_type, other.rank)

    def __hash__(self):
        return hash((self.cartan_type, self.rank))

    # -- pairings and dominance ------------------------------------------

    def pairing(self, beta: Weight, i: int) -> Fraction:
        """Coroot pairing <beta, alpha_i^vee> for 1 <= i <= rank."""
        if not 1 <= i <= self.rank:
            raise IndexError(f"simple root index {i} out of range 1..{self.rank}")
        form = self.coroot_forms[i - 1]
        return sum((Fraction(c) * beta[j] for j, c in enumerate(form) if c), Fraction(0))

    def is_dominant(self, beta: Weight) -> bool:
        return all(self.pairing(beta, i) >= 0 for i in range(1, self.rank + 1))

    def dominant_representative(self, beta: Weight) -> Weight:
        """The unique dominant weight in the Weyl orbit of ``beta``.

        Applies simple reflections while some coroot pairing is negative;
        this terminates because each step strictly increases the height.
        """
        cur = beta
        while True:
            for i in range(1, self.rank + 1):
                p = self.pairing(cur, i)
                if p < 0:
                    cur = w_sub(cur, w_scale(p, self.simple_roots[i - 1]))
                    break
            else:
                return cur

    def reflect(self, beta: Weight, i: int) -> Weight:
        """Simple reflection s_i applied to ``beta``."""
        return w_sub(beta, w_scale(self.pairing(beta, i), self.simple_roots[i - 1]))

    def weyl_orbit(self, beta: Weight) -> set[Weight]:
        """Orbit of ``beta`` under W, generated by simple reflections."""
        seen = {beta}
        frontier = [beta]
        while frontier:
            nxt = []
            for v in frontier:
                for i in range(1, self.rank + 1):
                    img = self.reflect(v, i)
                    if img not in seen:
                        seen.add(img)
                        nxt.append(img)
            frontier = nxt
        return seen

    # -- convenience -----------------------------------------------------

    @property
    def weyl_order(self) -> int:
        return len(self.weyl_elements)

    def fundamental(self, k: int) -> Weight:
        if not 1 <= k <= self.rank:
            raise IndexError(f"fundamental weight index {k} out of range 1..{self.rank}")
        return self.fundamental_weights[k - 1]

    def zero(self) -> Weight:
        return w_zero(self.ambient_dim)

    def in_weight_lattice(self, beta: Weight) -> bool:
        """Membership in P: integer coroot pairings and lattice coordinates."""
        if len(beta) != self.ambient_dim:
            return False
        if any((2 * c).denominator != 1 for c in beta):
            return False
        return all(self.pairing(beta, i).denominator == 1 for i in range(1, self.rank + 1))

    def root_coordinates(self, gamma: Weight) -> tuple[Fraction, ...] | None:
        """Coefficients of ``gamma`` on the simple roots, or None if outside QR."""
        coords = _solve_in_basis(self.simple_roots, gamma)
        return coords

    # -- fast scaled-integer helpers for DP-heavy callers ----------------

    def scaled(self, beta: Weight) -> tuple[int, ...]:
        """2*beta as an int tuple (exact for the half-integer lattice)."""
        out = []
        for c in beta:
            d = 2 * c
            if d.denominator != 1:
                raise ValueError(f"weight {beta} is not in the half-integer lattice")
            out.append(d.numerator)
        return tuple(out)

    def unscaled(self, v: tuple[int, ...]) -> Weight:
        return tuple(Fraction(c, 2) for c in v)

    def scaled_dominance_checker(self):
        """Predicate on scaled int tuples equivalent to ``is_dominant``."""
        n = self.ambient_dim
        ctype = self.cartan_type
        if ctype == "A":
            def ok(v, n=n):
                return all(v[j] >= v[j + 1] for j in range(n - 1))
        elif ctype in ("B", "C"):
            def ok(v, n=n):
                return v[n - 1] >= 0 and all(v[j] >= v[j + 1] for j in range(n - 1))
        else:  # D
            def ok(v, n=n):
                return v[n - 2] >= -v[n - 1] and all(v[j] >= v[j + 1] for j in range(n - 1))
        return ok


def _solve_in_basis(basis: tuple[Weight, ...], target: Weight) -> tuple[Fraction, ...] | None:
    """Exact least-structure solve of sum c_k basis[k] = target (Gauss on Fractions)."""
    n = len(basis)
    dim = len(target)
    # Augmented matrix, columns = basis vectors.
    rows = [[basis[k][j] for k in range(n)] + [target[j]] for j in range(dim)]
    piv_cols: list[int] = []
    r = 0
    for c in range(n):
        piv = next((k for k in range(r, dim) if rows[k][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for k in range(dim):
            if k != r and rows[k][c] != 0:
                f = rows[k][c]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[r])]
        piv_cols.append(c)
        r += 1
        if r == dim:
            break
    # Consistency: zero rows must have zero RHS.
    for k in range(r, dim):
        if rows[k][n] != 0:
            return None
    sol = [Fraction(0)] * n
    for row_idx, c in enumerate(piv_cols):
        sol[c] = rows[row_idx][n]
    return tuple(sol)


def _simple_roots(ctype: str, rank: int, dim: int) -> list[Weight]:
    eps = [tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)]
    alphas = [w_sub(eps[i], eps[i + 1]) for i in range(min(rank, dim - 1))]
    if ctype == "B":
        alphas.append(eps[rank - 1])
    elif ctype == "C":
        alphas.append(w_scale(2, eps[rank - 1]))
    elif ctype == "D":
        alphas.append(w_add(eps[rank - 2], eps[rank - 1]))
    return alphas


def _positive_roots(ctype: str, dim: int) -> list[Weight]:
    eps = [tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)]
    roots: list[Weight] = []
    for i in range(dim):
        for j in range(i + 1, dim):
            roots.append(w_sub(eps[i], eps[j]))
    if ctype == "A":
        return roots
    for i in range(dim):
        for j in range(i + 1, dim):
            roots.append(w_add(eps[i], eps[j]))
    if ctype == "B":
        roots.extend(eps)
    elif ctype == "C":
        roots.extend(w_scale(2, e) for e in eps)
    return roots


def _fundamental_weights(ctype: str, rank: int, dim: int) -> list[Weight]:
    def e_sum(k: int) -> Weight:
        return tuple(Fraction(int(j < k)) for j in range(dim))

    if ctype == "A":
        return [e_sum(i) for i in range(1, rank + 1)]
    if ctype == "B":
        omegas = [e_sum(i) for i in range(1, rank)]
        omegas.append(tuple(_HALF for _ in range(dim)))
        return omegas
    if ctype == "C":
        return [e_sum(i) for i in range(1, rank + 1)]
    # D
    omegas = [e_sum(i) for i in range(1, rank - 1)]
    half_all = [_HALF] * dim
    minus_last = half_all[:-1] + [-_HALF]
    omegas.append(tuple(minus_last))
    omegas.append(tuple(half_all))
    return omegas


def _coroot_forms(ctype: str, rank: int, dim: int) -> list[tuple[int, ...]]:
    forms = []
    for i in range(min(rank, dim - 1)):
        row = [0] * dim
        row[i], row[i + 1] = 1, -1
        forms.append(tuple(row))
    tail = [0] * dim
    if ctype == "B":
        tail[rank - 1] = 2
        forms.append(tuple(tail))
    elif ctype == "C":
        tail[rank - 1] = 1
        forms.append(tuple(tail))
    elif ctype == "D":
        tail[rank - 2] = tail[rank - 1] = 1
        forms.append(tuple(tail))
    return forms


def _enumerate_weyl(ctype: str, dim: int) -> list[WeylElement]:
    elements: list[WeylElement] = []
    for perm in itertools.permutations(range(dim)):
        perm_sign = _perm_sign(perm)
        if ctype == "A":
            elements.append((perm, (1,) * dim, perm_sign))
            continue
        for signs in itertools.product((1, -1), repeat=dim):
            neg = signs.count(-1)
            if ctype == "D" and neg % 2:
                continue
            det = perm_sign * (-1) ** neg
            elements.append((perm, signs, det))
    return elements


def _perm_sign(perm: tuple[int, ...]) -> int:
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


_SPEC_CACHE: dict[tuple[str, int, int], "RootSystemSpec"] = {}


def build_root_system(
    cartan_type: str,
    rank: int,
    weyl_rank_bound: int = DEFAULT_WEYL_RANK_BOUND,
) -> RootSystemSpec:
    """Construct the full root-system data for one classical type.

    Type A with ``rank=r`` is the gl_{r+1} convention (ambient dimension
    r+1).  Types B and C need rank >= 2 and D needs rank >= 2; Weyl groups
    are fully enumerated, so ranks above ``weyl_rank_bound`` are refused
    for B, C, D (the group has 2^n n! elements).
    """
    ctype = cartan_type.upper().strip()
    if ctype not in ("A", "B", "C", "D"):
        raise UnsupportedTypeError(
            f"unsupported Cartan type {cartan_type!r}: only classical types A, B, C, D"
        )
    cached = _SPEC_CACHE.get((ctype, rank, weyl_rank_bound))
    if cached is not None:
        return cached
    if rank < 1:
        raise ValueError(f"rank must be >= 1, got {rank}")
    if ctype in ("B", "C", "D") and rank < 2:
        raise ValueError(f"type {ctype} needs rank >= 2, got {rank}")
    dim = rank + 1 if ctype == "A" else rank
    if ctype != "A" and rank > weyl_rank_bound:
        raise ResourceLimitError(
            f"type {ctype} rank {rank} exceeds the Weyl enumeration bound "
            f"{weyl_rank_bound} (|W| = 2^n n! grows too fast); raise weyl_rank_bound "
            "explicitly if you really want this"
        )
    if ctype == "A" and rank + 1 > weyl_rank_bound + 2:
        raise ResourceLimitError(
            f"type A rank {rank} exceeds the enumeration bound ({rank + 1}! elements)"
        )

    simple = _simple_roots(ctype, rank, dim)
    positive = _positive_roots(ctype, dim)
    fundamental = _fundamental_weights(ctype, rank, dim)
    rho = w_scale(_HALF, _reduce_sum(positive, dim))
    forms = _coroot_forms(ctype, rank, dim)
    weyl = _enumerate_weyl(ctype, dim)

    pos_coords = []
    for alpha in positive:
        coords = _solve_in_basis(tuple(simple), alpha)
        if coords is None or any(c.denominator != 1 for c in coords):
            raise AssertionError(f"positive root {alpha} not in the root lattice")
        pos_coords.append(tuple(int(c) for c in coords))

    spec = RootSystemSpec(
        cartan_type=ctype,
        rank=rank,
        ambient_dim=dim,
        simple_roots=tuple(simple),
        positive_roots=tuple(positive),
        fundamental_weights=tuple(fundamental),
        rho=rho,
        weyl_elements=tuple(weyl),
        coroot_forms=tuple(forms),
        positive_root_coords=tuple(pos_coords),
    )
    _SPEC_CACHE[(ctype, rank, weyl_rank_bound)] = spec
    return spec


def _reduce_sum(weights, dim: int) -> Weight:
    total = w_zero(dim)
    for w in weights:
        total = w_add(total, w)
    return total


#: Minuscule fundamental-weight indices per classical type; for type A the
#: rank is the semisimple rank r (gl_{r+1}), every fundamental is minuscule.
def minuscule_indices(spec: RootSystemSpec) -> tuple[int, ...]:
    ctype, n = spec.cartan_type, spec.rank
    if ctype == "A":
        return tuple(range(1, n + 1))
    if ctype == "B":
        return (n,)
    if ctype == "C":
        return (1,)
    return (1, n - 1, n)


def is_minuscule(spec: RootSystemSpec, delta: Weight) -> bool:
    return any(delta == spec.fundamental(k) for k in minuscule_indices(spec))


def spec_to_dict(spec: RootSystemSpec) -> dict:
    """JSON-friendly dump used by the ``roots`` CLI subcommand."""
    return {
        "type": spec.cartan_type,
        "rank": spec.rank,
        "ambient_dim": spec.ambient_dim,
        "simple_roots": [format_weight(a) for a in spec.simple_roots],
        "positive_roots": [format_weight(a) for a in spec.positive_roots],
        "fundamental_weights": [format_weight(w) for w in spec.fundamental_weights],
        "rho": format_weight(spec.rho),
        "weyl_order": spec.weyl_order,
        "minuscule_fundamental_indices": list(minuscule_indices(spec)),
    }
