"""Spectral parameters: solving x from t, characters, letter laws, drift.

The t-tuple assigns a positive real to each simple root; x solves
x^{alpha_i} = 1/t_i (log-linear system).  Letter probabilities on a
crystal are p_a = x^{wt(a)} / s(x) with s the character, the drift is the
mean letter weight, psi(lambda) = x^{-lambda} s_lambda(x), and
nabla = prod_{alpha > 0} 1/(1 - t^[alpha]).

Counts stay exact elsewhere; everything here is double precision with
centralized tolerances (1e-12 normalization, 1e-10 identity checks).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .crystal import Crystal
from .errors import ChamberDomainError
from .rootsystem import RootSystemSpec, Weight, apply_weyl, format_weight, w_add

NORMALIZATION_TOL = 1e-12
IDENTITY_TOL = 1e-10
#: |x^alpha - 1| below this means the Weyl denominator degenerates
DEGENERATE_TOL = 1e-9


def _as_float_vector(w) -> tuple[float, ...]:
    return tuple(float(c) for c in w)


def weight_power(log_x: tuple[float, ...], w) -> float:
    """x^w = exp(sum w_j log x_j); w may have Fraction or float entries."""
    return math.exp(sum(float(c) * lx for c, lx in zip(w, log_x)))


def validate_t(spec: RootSystemSpec, t) -> tuple[float, ...]:
    t = tuple(float(v) for v in t)
    if len(t) != spec.rank:
        raise ValueError(f"expected {spec.rank} t-values, got {len(t)}")
    if any(v <= 0 for v in t):
        raise ValueError(f"t must be strictly positive, got {t}")
    return t


def solve_x_from_t(spec: RootSystemSpec, t, gauge: str = "sum1") -> tuple[float, ...]:
    """Positive solution of x^{alpha_i} = 1/t_i.

    Solved in log space; the system is underdetermined for type A (the
    kernel is the constant direction), where ``gauge`` picks the solution:
    ``sum1`` rescales so that sum(x) = 1, ``x1`` so that x_1 = 1.
    """
    t = validate_t(spec, t)
    rows = [[float(c) for c in alpha] for alpha in spec.simple_roots]
    rhs = [-math.log(v) for v in t]
    log_x, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    x = np.exp(log_x)
    if spec.cartan_type == "A":
        if gauge == "sum1":
            x = x / x.sum()
        elif gauge == "x1":
            x = x / x[0]
        elif gauge != "raw":
            raise ValueError(f"unknown gauge {gauge!r}; use 'sum1', 'x1' or 'raw'")
    return tuple(float(v) for v in x)


def t_from_x(spec: RootSystemSpec, x) -> tuple[float, ...]:
    """Recover t_i = x^{-alpha_i} from a solved x (gauge independent)."""
    log_x = tuple(math.log(v) for v in x)
    return tuple(
        1.0 / weight_power(log_x, alpha) for alpha in spec.simple_roots
    )


def weyl_dimension(spec: RootSystemSpec, lam: Weight) -> int:
    """dim V(lambda) by the exact Weyl product formula."""
    num = Fraction(1)
    lam_rho = w_add(lam, spec.rho)
    for alpha in spec.positive_roots:
        a = sum((c * d for c, d in zip(lam_rho, alpha)), Fraction(0))
        b = sum((c * d for c, d in zip(spec.rho, alpha)), Fraction(0))
        num *= a / b
    assert num.denominator == 1, f"non-integral dimension for {lam}"
    return int(num)


def _weyl_alternating_shifted(spec: RootSystemSpec, lam: Weight, log_x) -> float:
    """sum_w det(w) x^{w(lam+rho) - (lam+rho)}; equals psi(lam) * denominator."""
    lam_rho = w_add(lam, spec.rho)
    base = _as_float_vector(lam_rho)
    total = 0.0
    for perm, signs, det in spec.weyl_elements:
        moved = apply_weyl((perm, signs, det), lam_rho)
        expo = sum((float(m) - b) * lx for m, b, lx in zip(moved, base, log_x))
        total += det * math.exp(expo)
    return total


def _weyl_denominator(spec: RootSystemSpec, log_x) -> float:
    prod = 1.0
    for alpha in spec.positive_roots:
        prod *= 1.0 - 1.0 / weight_power(log_x, alpha)
    return prod


def _is_degenerate(spec: RootSystemSpec, log_x) -> bool:
    return any(
        abs(weight_power(log_x, alpha) - 1.0) < DEGENERATE_TOL
        for alpha in spec.positive_roots
    )


def weyl_character(spec: RootSystemSpec, lam: Weight, x) -> float:
    """s_lambda(x) by the Weyl character formula.

    At x = (1,...,1) the denominator vanishes and the exact dimension is
    returned instead.  Other degenerate x (some x^alpha = 1) are perturbed
    by a relative 1e-7 jitter, with a warning about degraded precision.
    """
    if not spec.is_dominant(lam):
        raise ValueError(f"{format_weight(lam)} is not dominant")
    x = tuple(float(v) for v in x)
    if any(v <= 0 for v in x):
        raise ValueError(f"x must be strictly positive, got {x}")
    if all(v == 1.0 for v in x):
        return float(weyl_dimension(spec, lam))
    log_x = tuple(math.log(v) for v in x)
    if _is_degenerate(spec, log_x):
        warnings.warn(
            "Weyl denominator degenerates at this x; jittering by 1e-7 "
            "(degraded precision)",
            stacklevel=2,
        )
        x = tuple(v * (1.0 + 1e-7 * (j + 1)) for j, v in enumerate(x))
        log_x = tuple(math.log(v) for v in x)
    shifted = _weyl_alternating_shifted(spec, lam, log_x)
    denom = _weyl_denominator(spec, log_x)
    return weight_power(log_x, lam) * shifted / denom


def psi(spec: RootSystemSpec, lam: Weight, x) -> float:
    """psi(lambda) = x^{-lambda} s_lambda(x), computed cancellation-free."""
    x = tuple(float(v) for v in x)
    log_x = tuple(math.log(v) for v in x)
    if all(v == 1.0 for v in x):
        return float(weyl_dimension(spec, lam))
    if _is_degenerate(spec, log_x):
        return weyl_character(spec, lam, x) / weight_power(log_x, lam)
    shifted = _weyl_alternating_shifted(spec, lam, log_x)
    return shifted / _weyl_denominator(spec, log_x)


def crystal_character(crystal: Crystal, x) -> float:
    """char = sum over vertices of x^{wt(b)}."""
    log_x = tuple(math.log(float(v)) for v in x)
    return sum(weight_power(log_x, w) for w in crystal.weights)


def nabla(spec: RootSystemSpec, t) -> float:
    """prod over positive roots of 1/(1 - t^[alpha]); needs all t^[alpha] < 1."""
    t = validate_t(spec, t)
    prod = 1.0
    for alpha, coords in zip(spec.positive_roots, spec.positive_root_coords):
        t_alpha = math.prod(ti ** c for ti, c in zip(t, coords) if c)
        if t_alpha >= 1.0:
            raise ChamberDomainError(
                f"t^[alpha] = {t_alpha:.6g} >= 1 for positive root "
                f"{format_weight(alpha)}; nabla needs drift in the open chamber "
                "(all t_i < 1)"
            )
        prod /= 1.0 - t_alpha
    return prod


@dataclass(frozen=True, eq=False)
class SpectralParams:
    """Solved spectral data driving the walk W and the chain H."""

    spec: RootSystemSpec
    crystal: Crystal
    t: tuple[float, ...]
    gauge: str
    x: tuple[float, ...]
    log_x: tuple[float, ...]
    s_delta: float
    letter_probs: tuple[float, ...]
    drift: tuple[float, ...]

    def x_pow(self, w) -> float:
        return weight_power(self.log_x, w)

    def character(self, lam: Weight) -> float:
        return weyl_character(self.spec, lam, self.x)

    def psi(self, lam: Weight) -> float:
        return psi(self.spec, lam, self.x)

    def nabla(self) -> float:
        return nabla(self.spec, self.t)

    @property
    def drift_in_chamber(self) -> bool:
        return all(v < 1.0 for v in self.t)

    def drift_pairings(self) -> tuple[float, ...]:
        return tuple(
            sum(c * m for c, m in zip(form, self.drift) if c)
            for form in self.spec.coroot_forms
        )


def letter_distribution(crystal: Crystal, x, t=None) -> SpectralParams:
    """Exponential-in-weight letter law p_a = x^{wt(a)} / s(x) on a crystal.

    ``x`` should solve the t-system so that arrows scale probabilities by
    t_i; both the normalization and the arrow relation are verified to
    1e-12 relative.
    """
    spec = crystal.spec
    x = tuple(float(v) for v in x)
    log_x = tuple(math.log(v) for v in x)
    raw = [weight_power(log_x, w) for w in crystal.weights]
    s = sum(raw)
    probs = tuple(v / s for v in raw)
    assert abs(sum(probs) - 1.0) < NORMALIZATION_TOL
    if t is None:
        t = t_from_x(spec, x)
    else:
        t = validate_t(spec, t)
    for v in range(crystal.dim):
        for i0, tgt in enumerate(crystal.f_action[v]):
            if tgt is not None:
                assert abs(probs[tgt] - probs[v] * t[i0]) <= 1e-12 + 1e-12 * probs[v]
    m = drift_of_probs(crystal, probs)
    return SpectralParams(
        spec=spec,
        crystal=crystal,
        t=t,
        gauge="given-x",
        x=x,
        log_x=log_x,
        s_delta=s,
        letter_probs=probs,
        drift=m,
    )


def drift_of_probs(crystal: Crystal, probs) -> tuple[float, ...]:
    dim = crystal.spec.ambient_dim
    m = [0.0] * dim
    for p, w in zip(probs, crystal.weights):
        for j in range(dim):
            m[j] += p * float(w[j])
    return tuple(m)


def drift(params: SpectralParams) -> tuple[float, ...]:
    """Mean increment of the walk, sum_a p_a wt(a)."""
    return params.drift


def make_params(
    spec: RootSystemSpec, crystal: Crystal, t, gauge: str = "sum1"
) -> SpectralParams:
    """Solve x from t and attach the letter law on ``crystal``."""
    t = validate_t(spec, t)
    x = solve_x_from_t(spec, t, gauge=gauge)
    params = letter_distribution(crystal, x, t=t)
    object.__setattr__(params, "gauge", gauge)
    return params


def _chamber_pairings(spec: RootSystemSpec, direction) -> tuple[float, ...]:
    d = tuple(float(v) for v in direction)
    pair = tuple(
        sum(c * v for c, v in zip(form, d) if c) for form in spec.coroot_forms
    )
    if any(p <= 0 for p in pair):
        raise ChamberDomainError(
            f"direction {d} is not strictly inside the Weyl chamber "
            f"(coroot pairings {pair})"
        )
    if spec.cartan_type == "A" and d[-1] <= 0:
        raise ChamberDomainError(
            f"direction {d} has nonpositive last coordinate; the gl chamber "
            "interior needs d_n > 0"
        )
    return pair


def t_for_drift(
    spec: RootSystemSpec,
    crystal: Crystal,
    target_m,
    tol: float = 1e-10,
    max_sweeps: int = 200,
) -> tuple[float, ...]:
    """t in (0,1)^n whose drift equals the given ambient vector exactly.

    Useful for pinning rational drifts so that ell*m hits lattice points
    along an ell-ladder (asymptotic ladders then carry no rounding
    wobble).  For type A the coordinate sum of any drift is |delta|, so
    the target must satisfy that constraint.
    """
    u = _chamber_pairings(spec, target_m)
    n = spec.rank
    if spec.cartan_type == "A":
        delta_sum = float(sum(crystal.weights[0]))
        if abs(sum(float(v) for v in target_m) - delta_sum) > 1e-9:
            raise ChamberDomainError(
                f"type A drift has fixed coordinate sum {delta_sum}; "
                f"target sums to {sum(float(v) for v in target_m)}"
            )

    def pairings_at(t_vec):
        params = letter_distribution(crystal, solve_x_from_t(spec, t_vec, gauge="raw"))
        return params.drift_pairings()

    t_vec = [0.5] * n
    lo, hi = 1e-9, 1.0 - 1e-12
    for _ in range(max_sweeps):
        m = pairings_at(t_vec)
        worst = max(abs(a - g) / max(g, 1e-300) for a, g in zip(m, u))
        if worst <= tol:
            return tuple(t_vec)
        for i in range(n):
            a, b = lo, hi
            for _ in range(100):
                mid = 0.5 * (a + b)
                t_vec[i] = mid
                val = pairings_at(t_vec)[i]
                if val > u[i]:
                    a = mid
                else:
                    b = mid
            t_vec[i] = 0.5 * (a + b)
    raise ChamberDomainError(
        f"drift targeting did not converge to {tol} in {max_sweeps} sweeps; "
        "is the target attainable with 0 < t_i < 1?"
    )


def t_from_drift_direction(
    spec: RootSystemSpec,
    crystal: Crystal,
    direction,
    tol: float = 1e-8,
    max_sweeps: int = 500,
) -> tuple[float, ...]:
    """Find t in (0,1)^n whose drift is parallel to ``direction``.

    Per-coordinate bisection on the drift pairings m_i, swept until the
    pairing vector is proportional to the direction's pairings.  The
    coordinates interact through the normalization, so the sweep iterates
    to a fixed point rather than solving each coordinate once.
    """
    u = _chamber_pairings(spec, direction)
    n = spec.rank

    def pairings_at(t_vec):
        params = letter_distribution(crystal, solve_x_from_t(spec, t_vec, gauge="raw"))
        return params.drift_pairings()

    if spec.cartan_type == "A":
        # Coordinate sum is conserved, so the scale is pinned by the target.
        d = tuple(float(v) for v in direction)
        delta_sum = float(sum(crystal.weights[0]))
        scale_target = delta_sum / sum(d)
        target = tuple(p * scale_target for p in u)
    else:
        target = None  # free scale, re-projected each sweep

    t_vec = [0.5] * n
    lo, hi = 1e-9, 1.0 - 1e-12
    for _ in range(max_sweeps):
        m = pairings_at(t_vec)
        if target is None:
            c = sum(a * b for a, b in zip(m, u)) / sum(b * b for b in u)
            goal = tuple(c * b for b in u)
        else:
            goal = target
        worst = max(abs(a - g) / max(g, 1e-300) for a, g in zip(m, goal))
        if worst <= tol:
            return tuple(t_vec)
        for i in range(n):
            goal_i = goal[i]
            a, b = lo, hi
            for _ in range(80):
                mid = 0.5 * (a + b)
                t_vec[i] = mid
                val = pairings_at(t_vec)[i]
                if val > goal_i:
                    a = mid
                else:
                    b = mid
            t_vec[i] = 0.5 * (a + b)
    raise ChamberDomainError(
        f"drift-direction solve did not converge to {tol} in {max_sweeps} sweeps"
    )
