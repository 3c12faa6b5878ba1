"""Short character sums, complete-sum checks, moments, bound calculators.

Sums accumulate exact root-of-unity index histograms and convert to a
complex number once at the end, so no float error accrues over the box.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from . import char_core as cc
from . import field_core as fc
from . import forms as fm

BOX_CAP = 10**8
MOMENT_CAP = 10**7
BAD_TUPLE_CAP = 10**7


def _histogram_value(weights: Sequence[int], p: int) -> complex:
    total = complex(0, 0)
    for e, w in enumerate(weights):
        if w:
            total += w * cc.root_of_unity(e, max(1, p - 1))
    return total


@dataclass(frozen=True)
class CharSumResult:
    value: complex
    term_count: int
    p: int
    box: fm.BoxSpec
    source: str
    weights: tuple[int, ...]
    zero_terms: int

    def __post_init__(self):
        assert abs(self.value) <= self.term_count + 1e-9
        assert sum(self.weights) + self.zero_terms == self.term_count


def charsum_direct(chi: cc.DirichletChar, F: fm.FormSpec, B: fm.BoxSpec) -> CharSumResult:
    """Sum chi(F(x)) over the box, zero arguments contributing zero."""
    if chi.p != F.p:
        raise ValueError("character modulus and form modulus differ")
    if B.dim != F.n:
        raise ValueError("box dimension and form arity differ")
    if B.volume > BOX_CAP:
        raise ValueError(f"box volume {B.volume} over cap {BOX_CAP}")
    p = F.p
    weights = [0] * max(1, p - 1)
    zeros = 0
    for x in B.iter_points():
        idx = cc.char_index(chi, fm._eval_int(F, x))
        if idx is None:
            zeros += 1
        else:
            weights[idx] += 1
    return CharSumResult(
        _histogram_value(weights, p),
        B.volume,
        p,
        B,
        f"direct deg-{F.k} form in {F.n} vars",
        tuple(weights),
        zeros,
    )


def charsum_lifted(
    D: fm.NormFormDecomposition, chi: cc.DirichletChar, B: fm.BoxSpec
) -> CharSumResult:
    """Sum the product of norm-pulled-back character values over the box."""
    if chi.p != D.p:
        raise ValueError("character modulus and decomposition modulus differ")
    if B.dim != D.n:
        raise ValueError("box dimension and decomposition arity differ")
    if B.volume > BOX_CAP:
        raise ValueError(f"box volume {B.volume} over cap {BOX_CAP}")
    p = D.p
    psis = [cc.lift_character(chi, ctx) for ctx in D.ctxs]
    order = max(1, p - 1)
    weights = [0] * order
    zeros = 0
    for x in B.iter_points():
        idx_sum = 0
        dead = False
        for i, psi in enumerate(psis):
            idx = cc.lifted_index(psi, D.lam(i, x))
            if idx is None:
                dead = True
                break
            idx_sum += idx
        if dead:
            zeros += 1
        else:
            weights[idx_sum % order] += 1
    return CharSumResult(
        _histogram_value(weights, p),
        B.volume,
        p,
        B,
        f"lifted product of {D.s} norm factors",
        tuple(weights),
        zeros,
    )


def weil_complete_sum(
    psi: Union[cc.DirichletChar, cc.LiftedCharacter],
    factors: Sequence[tuple[int, int]],
):
    """Complete sum of psi at a monic product of integer-shift linear factors.

    `factors` lists (shift, multiplicity) pairs for f(X) = prod (X+shift)^mult.
    Returns (value, bound, holds): the exact sum over the whole field, the
    square-root bound (m-1) sqrt(q) when f is not a d-th power for d the
    character order, the trivial bound q when it is, and whether |value|
    stays within that bound.
    """
    lifted = isinstance(psi, cc.LiftedCharacter)
    p = psi.base.p if lifted else psi.p
    q = psi.ctx.order if lifted else p
    d = cc.lifted_order(psi) if lifted else cc.char_order(psi)
    if q > fc.FIELD_SIZE_CAP:
        raise ValueError(f"field size {q} over cap {fc.FIELD_SIZE_CAP}")
    merged: dict[int, int] = {}
    for shift, mult in factors:
        if mult <= 0:
            raise ValueError("factor multiplicities must be positive")
        merged[shift % p] = merged.get(shift % p, 0) + mult
    if not merged:
        raise ValueError("factor list is empty")
    m = len(merged)
    is_power = all(mult % d == 0 for mult in merged.values())

    order = max(1, p - 1)
    weights = [0] * order
    zeros = 0
    if lifted:
        shifted = [(psi.ctx.from_int(shift), mult) for shift, mult in merged.items()]
        for x in psi.ctx.iter_elements():
            idx_sum = 0
            dead = False
            for shift, mult in shifted:
                idx = cc.lifted_index(psi, fc.ext_add(x, shift))
                if idx is None:
                    dead = True
                    break
                idx_sum += mult * idx
            if dead:
                zeros += 1
            else:
                weights[idx_sum % order] += 1
    else:
        for x in range(p):
            idx_sum = 0
            dead = False
            for shift, mult in merged.items():
                idx = cc.char_index(psi, x + shift)
                if idx is None:
                    dead = True
                    break
                idx_sum += mult * idx
            if dead:
                zeros += 1
            else:
                weights[idx_sum % order] += 1
    value = _histogram_value(weights, p)
    bound = float(q) if is_power else (m - 1) * math.sqrt(q)
    holds = abs(value) <= bound + 1e-9
    return value, bound, holds


def _cyclic_correlate(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    return [sum(a[(j + e) % n] * b[j] for j in range(n)) for e in range(n)]


def _cyclic_convolve(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    return [sum(a[i] * b[(e - i) % n] for i in range(n)) for e in range(n)]


def s2_moment(
    partition: Sequence[int],
    psis: Sequence[cc.LiftedCharacter],
    T: int,
    r: int,
) -> dict:
    """Exact 2r-th moment of the shifted product sum, fully enumerated.

    For each tuple z with one component per field, the inner sum runs over
    t in (0, T]; |inner|^{2r} is accumulated as integer weights on
    root-of-unity differences, so the reported value is exact.
    """
    partition = tuple(partition)
    if len(psis) != len(partition) or any(
        psi.ctx.m != ki for psi, ki in zip(psis, partition)
    ):
        raise ValueError("need one character per field, degrees matching the partition")
    if T < 1 or r < 1:
        raise ValueError("window and exponent must be positive")
    p = psis[0].base.p
    k = sum(partition)
    if p**k * T ** (2 * r) > MOMENT_CAP:
        raise ValueError("moment enumeration infeasible at this size")
    order = max(1, p - 1)
    total = [0] * order
    for z in itertools.product(*[psi.ctx.iter_elements() for psi in psis]):
        inner = [0] * order
        for t in range(1, T + 1):
            idx_sum = 0
            dead = False
            for psi, zi in zip(psis, z):
                idx = cc.lifted_index(psi, fc.ext_add(zi, psi.ctx.from_int(t)))
                if idx is None:
                    dead = True
                    break
                idx_sum += idx
            if not dead:
                inner[idx_sum % order] += 1
        sq = _cyclic_correlate(inner, inner, order)
        powed = sq
        for _ in range(r - 1):
            powed = _cyclic_convolve(powed, sq, order)
        for e in range(order):
            total[e] += powed[e]
    value = _histogram_value(total, p)
    assert abs(value.imag) < 1e-6
    bound_terms = (T ** (2 * r) * p ** (k / 2), T**r * float(p**k))
    return {
        "value": value.real,
        "weights": tuple(total),
        "bound_terms": bound_terms,
        "ratio": value.real / (bound_terms[0] + bound_terms[1]),
    }


def bad_tuple_count(T: int, r: int) -> tuple[int, int]:
    """Count tuples in (0, T]^{2r} in which every entry value repeats.

    A tuple counts when each of its values appears at least twice among the
    2r entries, which forces at most r distinct values.  Returns (count,
    bound) where bound = sum_{m=1}^{r} 2^{2r-2} T^m m^{2r-m}; count <= bound
    is asserted.
    """
    if T < 1 or r < 1:
        raise ValueError("window and exponent must be positive")
    if T ** (2 * r) > BAD_TUPLE_CAP:
        raise ValueError("tuple enumeration infeasible at this size")
    count = 0
    for t in itertools.product(range(1, T + 1), repeat=2 * r):
        if all(c >= 2 for c in Counter(t).values()):
            count += 1
    bound = sum(2 ** (2 * r - 2) * T**m * m ** (2 * r - m) for m in range(1, r + 1))
    assert count <= bound
    return count, bound


@dataclass(frozen=True)
class BoundParams:
    n: int
    k: int
    r: int
    eps: float = 0.0
    kappa: float = 0.0

    def __post_init__(self):
        if not 1 <= self.n <= self.k < 2 * self.n:
            raise ValueError("need 1 <= n <= k < 2n")
        if self.r <= self.k:
            raise ValueError("moment exponent r must exceed the degree k")
        if self.eps < 0 or self.kappa < 0:
            raise ValueError("eps and kappa must be nonnegative")


def p_exponent(params: BoundParams) -> Fraction:
    """Exact exponent of p in the main short-sum bound."""
    n, k, r = params.n, params.k, params.r
    return Fraction(k * (r + 2 * n - k), 4 * r * r)


def bound_rhs(params: BoundParams, H_min: int, H_norm: int, p: int) -> float:
    """Right-hand side of the main bound, with unit implied constant."""
    if H_min < 1 or H_norm < 1:
        raise ValueError("box data must be positive")
    n, k, r = params.n, params.k, params.r
    expo = float(p_exponent(params)) + params.eps
    return H_norm * H_min ** (-(2 * n - k) / r) * p**expo


def complete_sum_reference(p: int, n: int, H_norm: int) -> float:
    """Reference envelope for full-box sums; logged for comparison, never asserted."""
    return H_norm * p ** (-n / 2) + p ** (n / 2) * math.log(p) ** n


def delta_savings(n: int, r: float, kappa: float) -> float:
    """Power saving over the trivial bound at H_min = p^{1/4 + kappa}."""
    return (4 * n * r * kappa - n * n) / (2 * r * (n + 2 * r))


def optimal_moment_exponent(n: int, kappa: float) -> float:
    """Real-valued maximizer of the saving, to be rounded to an integer."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    return n * (1 + math.sqrt(1 + 2 * kappa)) / (4 * kappa)


def peak_saving(kappa: float) -> float:
    """Saving at the optimal exponent; behaves like kappa^2 for small kappa."""
    return 4 * kappa**2 / (1 + math.sqrt(1 + 2 * kappa)) ** 2
