"""Dyadic decompositions of 1/p and of the Cauchy kernel, their ramified
polylog generalization, and the truncation planner that turns remainder
bounds into explicit term schedules.

The reciprocal decomposition

    1/p = 1/(1 - e^{-p}) - sum_{k>=1} 2^{-k} / (1 + e^{-p/2^k})

is the seed of every expansion in this package; the Cauchy-kernel variant
adds the affine parameters (s, beta), and the ramified variant replaces
the geometric kernels by polylogarithms of order s < 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .scalar import DomainError, PoleError, ln_gamma, polylog

__all__ = [
    "CutProximityError",
    "dyadic_reciprocal_partial",
    "dyadic_cauchy_partial",
    "dyadic_cauchy_deriv_partial",
    "ramified_partial",
    "DyadicPlan",
    "RemainderModel",
    "remainder_bound",
    "plan_truncation",
    "ei_stokes_model",
    "ei_left_model",
    "psi_model",
    "MAX_LEVELS",
]

MAX_LEVELS = 60          # 2^-60 is below binary64 resolution
DENOM_GUARD = 1e-8       # singular-denominator threshold (absolute)
CUT_GUARD = 0.05         # relative distance from an expansion's cut


class CutProximityError(DomainError):
    """Argument too close to the expansion's cut; term counts blow up."""


def dyadic_reciprocal_partial(p: complex, n: int) -> complex:
    """Partial dyadic decomposition of 1/p:

        1/(1 - e^{-p}) - sum_{k=1}^{n} 2^{-k} / (e^{-p/2^k} + 1)

    which equals 1/(2^n (1 - e^{-p/2^n})) exactly and converges to 1/p.
    """
    p = complex(p)
    if p == 0:
        raise PoleError("dyadic_reciprocal_partial undefined at p = 0")
    if n < 0 or n > MAX_LEVELS:
        raise DomainError(f"level count must be in [0, {MAX_LEVELS}]")
    base_den = complex(-np.expm1(-p))  # 1 - e^{-p}
    if abs(base_den) < DENOM_GUARD:
        raise PoleError(f"denominator 1 - e^-p within {DENOM_GUARD} of 0 at p = {p}")
    total = 1.0 / base_den
    for k in range(1, n + 1):
        den = cmath.exp(-p / 2.0**k) + 1.0
        if abs(den) < DENOM_GUARD:
            raise PoleError(f"level-{k} denominator within {DENOM_GUARD} of 0 at p = {p}")
        total -= 2.0**-k / den
    return total


def dyadic_cauchy_partial(s: complex, p: complex, beta: complex, K: int) -> complex:
    """Partial dyadic decomposition of the Cauchy kernel 1/(s - p):

        -beta e^{-beta s} / (e^{-beta s} - e^{-beta p})
        + sum_{k=1}^{K} beta 2^{-k} e^{-2^{-k} beta s}
                        / (e^{-2^{-k} beta s} + e^{-2^{-k} beta p})
    """
    s = complex(s)
    p = complex(p)
    beta = complex(beta)
    if beta == 0:
        raise DomainError("beta must be nonzero")
    if p == s:
        raise PoleError("dyadic_cauchy_partial undefined at p = s")
    if K < 0 or K > MAX_LEVELS:
        raise DomainError(f"level count must be in [0, {MAX_LEVELS}]")
    es = cmath.exp(-beta * s)
    ep = cmath.exp(-beta * p)
    if abs(es - ep) < DENOM_GUARD:
        raise PoleError("base denominator within guard distance of 0")
    total = -beta * es / (es - ep)
    for k in range(1, K + 1):
        w = beta * 2.0**-k
        esk = cmath.exp(-w * s)
        epk = cmath.exp(-w * p)
        den = esk + epk
        if abs(den) < DENOM_GUARD:
            raise PoleError(f"level-{k} denominator within guard distance of 0")
        total += w * esk / den
    return total


def dyadic_cauchy_deriv_partial(s: complex, p: complex, K: int) -> complex:
    """Partial dyadic decomposition of 1/(s - p)^2 (the beta = 1 kernel
    differentiated in p):

        e^{-s-p} / (e^{-s} - e^{-p})^2
        + sum_{k=1}^{K} 4^{-k} e^{2^{-k}(-s-p)}
                        / (e^{-2^{-k} s} + e^{-2^{-k} p})^2
    """
    s = complex(s)
    p = complex(p)
    if p == s:
        raise PoleError("dyadic_cauchy_deriv_partial undefined at p = s")
    if K < 0 or K > MAX_LEVELS:
        raise DomainError(f"level count must be in [0, {MAX_LEVELS}]")
    den0 = cmath.exp(-s) - cmath.exp(-p)
    if abs(den0) < DENOM_GUARD:
        raise PoleError("base denominator within guard distance of 0")
    total = cmath.exp(-s - p) / den0**2
    for k in range(1, K + 1):
        w = 2.0**-k
        den = cmath.exp(-w * s) + cmath.exp(-w * p)
        if abs(den) < DENOM_GUARD:
            raise PoleError(f"level-{k} denominator within guard distance of 0")
        total += 4.0**-k * cmath.exp(w * (-s - p)) / den**2
    return total


def ramified_partial(s_exp: float, p: complex, K: int) -> complex:
    """Partial dyadic polylog decomposition of p^{s-1} for s < 1:

        (Gamma(s) sin(pi s) / pi) *
            [ Li_s(e^{-p}) - sum_{k=1}^{K} 2^{-k(1-s)} Li_s(-e^{-p/2^k}) ]

    reduces to the reciprocal decomposition at s = 0.  Requires Re p > 0
    so every polylog argument stays inside the unit disk.
    """
    p = complex(p)
    if s_exp >= 1.0:
        raise DomainError("ramified decomposition requires s < 1")
    if p == 0:
        raise PoleError("ramified_partial undefined at p = 0")
    if p.real <= 0:
        raise DomainError("ramified_partial requires Re p > 0")
    if K < 0 or K > MAX_LEVELS:
        raise DomainError(f"level count must be in [0, {MAX_LEVELS}]")
    if s_exp == 0.0:
        return dyadic_reciprocal_partial(p, K)
    if abs(s_exp - round(s_exp)) < 1e-12:
        raise DomainError("ramified decomposition needs non-integer s (or s = 0)")
    front = cmath.exp(ln_gamma(s_exp)) * math.sin(math.pi * s_exp) / math.pi
    total = polylog(s_exp, cmath.exp(-p))
    for k in range(1, K + 1):
        arg = -cmath.exp(-p / 2.0**k)
        if arg.imag == 0.0 or abs(arg) <= 1.0 - 1e-6:
            li = polylog(s_exp, arg)
        else:
            li = polylog(s_exp, arg)  # raises DomainError for unsupported z
        total -= 2.0 ** (-k * (1.0 - s_exp)) * li
    return front * total


# ---------------------------------------------------------------------------
# truncation planning
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DyadicPlan:
    """Truncation schedule: K dyadic levels beyond the base series and the
    number of terms kept in the base (index 0) and in each level."""

    K: int
    n_terms: List[int]
    predicted_error: float

    def __post_init__(self):
        if len(self.n_terms) != self.K + 1:
            raise DomainError("n_terms must have K + 1 entries")
        if any(n < 1 for n in self.n_terms):
            raise DomainError("every series keeps at least one term")
        if not (self.predicted_error > 0):
            raise DomainError("predicted_error must be positive")

    @property
    def terms_total(self) -> int:
        return sum(self.n_terms)


@dataclass
class RemainderModel:
    """Remainder behaviour of one dyadic expansion family.

    ``geometric_base(k)`` is the per-term geometric factor of level k
    (level 0 = base series), ``algebraic_exponent(x, k)`` the power of n
    modulating it, and ``prefactor`` a calibrated safety constant.  The
    planner additionally needs ``first_term(x, k)`` (magnitude of the
    level's leading term) and ``term_ratio(x, k, m)`` (exact magnitude
    ratio |t_{m+1}/t_m|), both closed-form for every family here.
    """

    name: str
    geometric_base: Callable[[int], float]
    algebraic_exponent: Callable[[complex, int], float]
    prefactor: float
    first_term: Callable[[complex, int], float] = None
    term_ratio: Callable[[complex, int, int], float] = None
    term_ratio_arr: Callable[[complex, int, "np.ndarray"], "np.ndarray"] = None
    cut_distance: Callable[[complex], float] = None
    spike_floor: Callable[[complex, int], int] = None
    max_levels: int = MAX_LEVELS

    def tail_estimate(self, x: complex, K: int) -> float:
        """Magnitude of everything in levels K+1, K+2, ... (leading terms
        dominate; they decay essentially geometrically in k)."""
        tail = 0.0
        for k in range(K + 1, self.max_levels + 1):
            tail += self.first_term(x, k)
        return self.prefactor * tail


def remainder_bound(model: RemainderModel, x: complex, k: int, n: int) -> float:
    """A-priori bound (up to the calibrated constant) for the remainder of
    level k after keeping n terms: prefactor * base^n * n^alg, anchored at
    the level's leading term magnitude."""
    if n < 1:
        raise DomainError("remainder_bound requires n >= 1")
    base = model.geometric_base(k)
    alg = model.algebraic_exponent(x, k)
    anchor = model.first_term(x, k) / base if model.first_term is not None else 1.0
    return model.prefactor * anchor * base**n * float(n) ** alg


def _terms_needed(model: RemainderModel, x: complex, k: int, budget: float,
                  n_cap: int = 200_000) -> int:
    """Smallest n whose remainder estimate (next term over the local
    geometric gap) is below the budget, walking exact term magnitudes.

    When the level's shifted variable has negative real part with a small
    imaginary part, the term magnitudes dip and then spike near the
    Pochhammer poles; truncating inside that window leaves a remainder the
    next-term heuristic cannot see, so the walk must clear it first.
    """
    floor = 1
    if model.spike_floor is not None:
        floor = model.spike_floor(x, k)
        if floor > n_cap:
            raise CutProximityError(
                f"{model.name}: level {k} must clear a pole window of {floor} terms "
                f"at x = {x}; too close to the expansion's cut for this tolerance"
            )
    t = model.first_term(x, k)  # |t_n| walking from n = 1
    n = 1
    chunk = 2048
    while n < n_cap:
        counts = np.arange(n, min(n + chunk, n_cap))
        if model.term_ratio_arr is not None:
            ratios = model.term_ratio_arr(x, k, counts)
        else:
            ratios = np.array([model.term_ratio(x, k, int(m)) for m in counts])
        # |t_{p+1}| and the geometric-gap remainder estimate at count p
        mags = t * np.minimum(np.cumprod(ratios), 1e280)
        rems = mags / np.maximum(1.0 - np.minimum(ratios, 0.95), 0.05)
        ok = np.flatnonzero((rems <= budget) & (counts >= floor))
        if len(ok):
            return int(counts[ok[0]])
        t = float(mags[-1])
        n = int(counts[-1]) + 1
    raise CutProximityError(
        f"{model.name}: level {k} needs more than {n_cap} terms at x = {x}; "
        "argument is too close to the expansion's cut for this tolerance"
    )


def plan_truncation(model: RemainderModel, x: complex, tol: float,
                    enforce_cut_guard: bool = True) -> DyadicPlan:
    """Choose the number of dyadic levels K and per-series term counts so
    the predicted truncation error stays below ``tol``.

    Half the budget goes to the discarded deep levels (their leading
    terms are 2^-k weighted and shrink in the effective variable 2^k x);
    the kept series split the other half evenly.  Callers prepared to pay
    for pole-window clearing may disable the cut-distance guard; the
    term-count cap still bounds the damage.
    """
    if not (1e-14 < tol < 1e-1):
        raise DomainError("tol must lie in (1e-14, 1e-1)")
    if enforce_cut_guard and model.cut_distance is not None \
            and model.cut_distance(x) < CUT_GUARD:
        raise CutProximityError(
            f"{model.name}: relative distance from the cut is below {CUT_GUARD}"
        )
    K = 0
    while model.tail_estimate(x, K) > 0.5 * tol:
        K += 1
        if K >= model.max_levels:
            break
    budget = 0.5 * tol / (K + 1)
    n_terms = [_terms_needed(model, x, k, budget / max(model.prefactor, 1.0))
               for k in range(K + 1)]
    predicted = model.tail_estimate(x, K) + (K + 1) * budget
    return DyadicPlan(K=K, n_terms=n_terms, predicted_error=min(predicted, tol))


# ---------------------------------------------------------------------------
# concrete families
# ---------------------------------------------------------------------------


def _ei_stokes_ratio(y: complex, k: int, m: int) -> float:
    base_den = 2.0 if k == 0 else abs(1.0 + cmath.exp(-1j * math.pi * 2.0**-k))
    yk = y if k == 0 else 2.0**k * y
    return m / (base_den * abs(yk + m))


def _pole_window(v: complex) -> int:
    """Terms needed to clear the Pochhammer pole window of a series in the
    shifted variable v; 1 when the poles are never approached.

    Term magnitudes keep growing until m ~ 2 |Re v| (only there does
    m / |v + m| fall below the geometric gap), so the window spans twice
    the pole index.  Truncating inside it leaves a cancellation residue
    fading roughly exponentially in |Im v|; 26 keeps that residue below
    every tolerance this planner accepts."""
    if v.real < -1.0 and abs(v.imag) < 26.0:
        return 2 * int(-v.real) + 24
    return 1


def ei_stokes_model(prefactor: float = 10.0) -> RemainderModel:
    """Remainder model for the Stokes-sector exponential-integral family
    (variable y = -i x / pi; base ratio 1/2, level-k ratio 1/|1+e_k|)."""

    def base(k: int) -> float:
        if k == 0:
            return 0.5
        return 1.0 / abs(1.0 + cmath.exp(-1j * math.pi * 2.0**-k))

    def alg(x: complex, k: int) -> float:
        scale = 1.0 if k == 0 else 2.0**k
        return -scale * complex(x).imag / math.pi

    def first(x: complex, k: int) -> float:
        y = -1j * complex(x) / math.pi
        if k == 0:
            return 1.0 / (2.0 * abs(y))
        ek = cmath.exp(-1j * math.pi * 2.0**-k)
        return 1.0 / (abs(1.0 + ek) * abs(2.0**k * y))

    def ratio(x: complex, k: int, m: int) -> float:
        return _ei_stokes_ratio(-1j * complex(x) / math.pi, k, m)

    def ratio_arr(x: complex, k: int, m: np.ndarray) -> np.ndarray:
        den = 2.0 if k == 0 else abs(1.0 + cmath.exp(-1j * math.pi * 2.0**-k))
        yk = 2.0**k * (-1j * complex(x) / math.pi)
        return m / (den * np.abs(yk + m))

    def cut_dist(x: complex) -> float:
        x = complex(x)
        # cut along the closed negative imaginary axis
        if x.imag >= 0:
            return 1.0
        return abs(x.real) / abs(x)

    def floor(x: complex, k: int) -> int:
        return _pole_window(2.0**k * (-1j * complex(x) / math.pi))

    return RemainderModel(
        name="ei-stokes",
        geometric_base=base,
        algebraic_exponent=alg,
        prefactor=prefactor,
        first_term=first,
        term_ratio=ratio,
        term_ratio_arr=ratio_arr,
        cut_distance=cut_dist,
        spike_floor=floor,
    )


def ei_left_model(prefactor: float = 10.0) -> RemainderModel:
    """Remainder model for the left-plane exponential-integral family
    (base ratio 1/(e-1), level-k ratio 1/(1+e^{2^-k}))."""

    def base(k: int) -> float:
        if k == 0:
            return 1.0 / (math.e - 1.0)
        return 1.0 / (1.0 + math.exp(2.0**-k))

    def alg(x: complex, k: int) -> float:
        scale = 1.0 if k == 0 else 2.0**k
        return -scale * complex(x).real

    def first(x: complex, k: int) -> float:
        x = complex(x)
        if k == 0:
            return math.e / ((math.e - 1.0) * abs(x))
        a = math.exp(2.0**-k)
        return a / ((a + 1.0) * abs(2.0**k * x))

    def ratio(x: complex, k: int, m: int) -> float:
        x = complex(x)
        if k == 0:
            return m / ((math.e - 1.0) * abs(x + m))
        a = math.exp(2.0**-k)
        return m / ((a + 1.0) * abs(2.0**k * x + m))

    def ratio_arr(x: complex, k: int, m: np.ndarray) -> np.ndarray:
        den = (math.e - 1.0) if k == 0 else (math.exp(2.0**-k) + 1.0)
        xk = 2.0**k * complex(x)
        return m / (den * np.abs(xk + m))

    def cut_dist(x: complex) -> float:
        x = complex(x)
        if x.real >= 0:
            return 1.0
        return abs(x.imag) / abs(x)

    def floor(x: complex, k: int) -> int:
        return _pole_window(2.0**k * complex(x))

    return RemainderModel(
        name="ei-left",
        geometric_base=base,
        algebraic_exponent=alg,
        prefactor=prefactor,
        first_term=first,
        term_ratio=ratio,
        term_ratio_arr=ratio_arr,
        cut_distance=cut_dist,
        spike_floor=floor,
    )


def psi_model(prefactor: float = 4.0) -> RemainderModel:
    """Remainder model for the digamma double expansion: every level-k
    series has geometric ratio 1/2 in the shifted variable 2^k x + 1.

    Level 0 is a bookkeeping placeholder (the closed-form ln x term);
    it always keeps one "term"."""

    def base(k: int) -> float:
        return 0.5

    def alg(x: complex, k: int) -> float:
        return 0.0

    def first(x: complex, k: int) -> float:
        if k == 0:
            return 0.0
        return 1.0 / (2.0 * abs(2.0**k * complex(x) + 1.0))

    def ratio(x: complex, k: int, m: int) -> float:
        if k == 0:
            return 0.0
        return m / (2.0 * abs(2.0**k * complex(x) + 1.0 + m))

    def cut_dist(x: complex) -> float:
        x = complex(x)
        return 1.0 if x.real > 0 else 0.0

    return RemainderModel(
        name="psi-dyadic",
        geometric_base=base,
        algebraic_exponent=alg,
        prefactor=prefactor,
        first_term=first,
        term_ratio=ratio,
        cut_distance=cut_dist,
    )
