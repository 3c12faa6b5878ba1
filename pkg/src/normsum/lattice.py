"""Congruence lattices over Z^{2n}: duals, point counts, successive minima.

A congruence lattice here is the set of integer pairs (x, y) satisfying
P x = Q y mod p for nonsingular P, Q; the main instances couple two
invertible coordinate maps through a block multiplication matrix built
from nonzero extension-field multipliers.  Everything is exact: integer
bases stored in Hermite normal form, minima as rationals.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import field_core as fc
from . import linalg as la

MINIMA_DIM_CAP = 6
SCAN_CAP = 10**8
CROSS_CHECK_CAP = 2 * 10**4
SYMMETRIZER_TRY_CAP = 10**5


def companion_matrix(ctx: fc.ExtFieldCtx) -> list[list[int]]:
    """Matrix of multiplication by the power-basis generator, acting on coords."""
    p, m = ctx.p, ctx.m
    M = [[0] * m for _ in range(m)]
    for i in range(m):
        M[i][m - 1] = (-ctx.defining_poly[i]) % p
    for j in range(m - 1):
        M[j + 1][j] = 1
    return M


@dataclass(frozen=True)
class MultiplicationMatrix:
    m: int
    entries: tuple[tuple[int, ...], ...]
    ctx: fc.ExtFieldCtx
    a: fc.ExtFieldElement


def mult_matrix(a: fc.ExtFieldElement) -> MultiplicationMatrix:
    """Matrix acting on power-basis coordinates as multiplication by `a`."""
    ctx = a.ctx
    p, m = ctx.p, ctx.m
    comp = companion_matrix(ctx)
    acc = [[0] * m for _ in range(m)]
    power = la.identity(m)
    for coeff in a.coeffs:
        if coeff:
            acc = [
                [(acc[i][j] + coeff * power[i][j]) % p for j in range(m)]
                for i in range(m)
            ]
        power = la.mat_mul(power, comp, p)
    return MultiplicationMatrix(m, tuple(tuple(r) for r in acc), ctx, a)


def mult_matrix_via_columns(a: fc.ExtFieldElement) -> tuple[tuple[int, ...], ...]:
    """Same matrix assembled column by column from field multiplication."""
    ctx = a.ctx
    m = ctx.m
    cols = []
    for j in range(m):
        basis = ctx.element(tuple(1 if t == j else 0 for t in range(m)))
        cols.append(fc.ext_mul(a, basis).coeffs)
    return tuple(tuple(cols[j][i] for j in range(m)) for i in range(m))


def block_mult_matrix(z: Sequence[fc.ExtFieldElement]) -> list[list[int]]:
    """Block-diagonal multiplication matrix, one block per component of z."""
    if not z:
        raise ValueError("multiplier tuple is empty")
    p = z[0].ctx.p
    n = sum(a.ctx.m for a in z)
    M = [[0] * n for _ in range(n)]
    off = 0
    for a in z:
        if a.ctx.p != p:
            raise ValueError("multiplier components live over different primes")
        blk = mult_matrix(a).entries
        for i in range(a.ctx.m):
            for j in range(a.ctx.m):
                M[off + i][off + j] = blk[i][j]
        off += a.ctx.m
    return M


@dataclass(frozen=True)
class CongruenceForm:
    """The relation P x = Q y mod p on pairs of n-vectors, P and Q nonsingular."""

    p: int
    P: tuple[tuple[int, ...], ...]
    Q: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.P)

    def holds(self, vec: Sequence[int]) -> bool:
        n = self.n
        x, y = list(vec[:n]), list(vec[n:])
        return la.mat_vec(self.P, x, self.p) == la.mat_vec(self.Q, y, self.p)


@dataclass(frozen=True)
class BlockData:
    """Provenance of a lattice built from coordinate maps and multipliers."""

    A: tuple[tuple[int, ...], ...]
    A_prime: tuple[tuple[int, ...], ...]
    z: tuple[fc.ExtFieldElement, ...]


@dataclass(frozen=True)
class IntegerLattice:
    dim: int
    basis: tuple[tuple[int, ...], ...]  # rows; the basis vectors are the columns
    form: Optional[CongruenceForm] = None
    block: Optional[BlockData] = None

    def __post_init__(self):
        if len(self.basis) != self.dim or any(len(r) != self.dim for r in self.basis):
            raise ValueError("basis must be a square matrix of size dim")
        if la.det_int(self.basis) == 0:
            raise ValueError("basis is singular")

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(self.basis[i][j] for i in range(self.dim))

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.dim)]

    def det(self) -> int:
        return abs(la.det_int(self.basis))

    def contains(self, vec: Sequence[int]) -> bool:
        """Exact membership: does some integer combination of columns give vec."""
        d = self.dim
        if all(self.basis[i][j] == 0 for j in range(d) for i in range(j)):
            v = list(vec)
            for j in range(d):
                piv = self.basis[j][j]
                if v[j] % piv:
                    return False
                c = v[j] // piv
                for i in range(j, d):
                    v[i] -= c * self.basis[i][j]
            return all(t == 0 for t in v)
        det = la.det_int(self.basis)
        for j in range(d):
            col_swapped = [
                [vec[i] if t == j else self.basis[i][t] for t in range(d)]
                for i in range(d)
            ]
            if la.det_int(col_swapped) % det:
                return False
        return True


def congruence_lattice(p: int, P, Q) -> IntegerLattice:
    """Lattice of integer pairs (x, y) with P x = Q y mod p."""
    la.check_prime(p)
    n = len(P)
    if len(Q) != n or any(len(r) != n for r in P) or any(len(r) != n for r in Q):
        raise ValueError("coupling matrices must be square of equal size")
    R = la.mat_mul(la.mat_inv(P, p), Q, p)
    if la.mat_det(Q, p) == 0:
        raise ValueError(f"matrix singular mod {p}")
    gens = [
        tuple([R[i][j] for i in range(n)] + [1 if i == j else 0 for i in range(n)])
        for j in range(n)
    ]
    gens += [
        tuple([p if t == i else 0 for t in range(n)] + [0] * n) for i in range(n)
    ]
    cols = la.hnf_columns(gens, 2 * n)
    basis = tuple(tuple(col[i] for col in cols) for i in range(2 * n))
    form = CongruenceForm(
        p,
        tuple(tuple(v % p for v in row) for row in P),
        tuple(tuple(v % p for v in row) for row in Q),
    )
    lat = IntegerLattice(2 * n, basis, form=form)
    assert lat.det() == p**n
    return lat


def build_lattice(A, A_prime, z: Sequence[fc.ExtFieldElement]) -> IntegerLattice:
    """Lattice of (x, y) with A x = M A' y mod p, M the block multiplier of z."""
    z = tuple(z)
    if not z:
        raise ValueError("multiplier tuple is empty")
    if any(a.is_zero() for a in z):
        raise ValueError("multiplier components must be nonzero")
    p = z[0].ctx.p
    M = block_mult_matrix(z)
    n = len(M)
    if len(A) != n or len(A_prime) != n:
        raise ValueError("coordinate maps must match the multiplier dimension")
    lat = congruence_lattice(p, A, la.mat_mul(M, A_prime, p))
    block = BlockData(
        tuple(tuple(v % p for v in row) for row in A),
        tuple(tuple(v % p for v in row) for row in A_prime),
        z,
    )
    return IntegerLattice(lat.dim, lat.basis, form=lat.form, block=block)


def _nullspace(rows, cols: int, p: int) -> list[list[int]]:
    if not rows:
        return [[1 if u == t else 0 for u in range(cols)] for t in range(cols)]
    red, pivots = la._row_reduce(rows, p)
    basis = []
    for f in (c for c in range(cols) if c not in pivots):
        vec = [0] * cols
        vec[f] = 1
        for r, c in enumerate(pivots):
            vec[c] = (-red[r][f]) % p
        basis.append(vec)
    return basis


def symmetrizer(M, p: int, seed: int = 0) -> list[list[int]]:
    """Symmetric nonsingular C with M C = C M^T mod p.

    Every square matrix is similar to its transpose through such a C, so one
    always exists.  The solution space of the linear constraints is swept
    deterministically first, then sampled with a seeded generator; the first
    nonsingular member wins.
    """
    m = len(M)
    Mm = [[v % p for v in row] for row in M]
    if Mm == la.transpose(Mm):
        return la.identity(m)
    unknowns = [(a, b) for a in range(m) for b in range(a, m)]
    index = {ab: t for t, ab in enumerate(unknowns)}

    def to_matrix(vec):
        C = [[0] * m for _ in range(m)]
        for (a, b), t in index.items():
            C[a][b] = C[b][a] = vec[t] % p
        return C

    rows = []
    for a in range(m):
        for b in range(a + 1, m):
            # constraint: (M C) symmetric, entry (a,b) minus entry (b,a)
            row = [0] * len(unknowns)
            for t in range(m):
                row[index[(min(t, b), max(t, b))]] += Mm[a][t]
                row[index[(min(t, a), max(t, a))]] -= Mm[b][t]
            rows.append([v % p for v in row])
    basis = _nullspace(rows, len(unknowns), p)

    def check(coeffs):
        vec = [
            sum(c * basis[t][u] for t, c in enumerate(coeffs)) % p
            for u in range(len(unknowns))
        ]
        C = to_matrix(vec)
        if la.mat_det(C, p) == 0:
            return None
        assert la.mat_mul(Mm, C, p) == la.mat_mul(C, la.transpose(Mm), p)
        return C

    tried = 0
    for coeffs in itertools.product(range(p), repeat=len(basis)):
        if tried >= SYMMETRIZER_TRY_CAP:
            break
        tried += 1
        if not any(coeffs):
            continue
        C = check(coeffs)
        if C is not None:
            return C
    rng = random.Random(seed)
    for _ in range(SYMMETRIZER_TRY_CAP):
        C = check([rng.randrange(p) for _ in range(len(basis))])
        if C is not None:
            return C
    raise AssertionError("no nonsingular symmetrizer found; similarity to the transpose guarantees one")


def block_symmetrizer(z: Sequence[fc.ExtFieldElement], seed: int = 0) -> list[list[int]]:
    """Direct sum of per-block symmetrizers for the block multiplier of z."""
    p = z[0].ctx.p
    n = sum(a.ctx.m for a in z)
    C = [[0] * n for _ in range(n)]
    off = 0
    for a in z:
        blk = symmetrizer(mult_matrix(a).entries, p, seed=seed)
        for i in range(a.ctx.m):
            for j in range(a.ctx.m):
                C[off + i][off + j] = blk[i][j]
        off += a.ctx.m
    return C


def dual_pairing_check(L: IntegerLattice, dual: IntegerLattice) -> None:
    """Every dual basis column pairs to 0 mod p with every basis column."""
    p = L.form.p
    for u in dual.columns():
        for x in L.columns():
            assert sum(a * b for a, b in zip(u, x)) % p == 0


def dual_lattice(L: IntegerLattice, report: bool = False):
    """The dual lattice scaled by p, again as an integer congruence lattice.

    Computed from the transposed coupling relation.  When block provenance is
    present, two more routes are taken: the explicit inverse-transpose
    relation, and the structured variant that couples the dual coordinate
    maps through the original block multiplier after symmetrizing it.  All
    routes must produce the identical canonical basis.
    """
    if L.form is None:
        raise ValueError("dual construction requires congruence provenance")
    p, n = L.form.p, L.form.n
    R = la.mat_mul(la.mat_inv(L.form.P, p), L.form.Q, p)
    neg_id = [[(p - 1) if i == j else 0 for j in range(n)] for i in range(n)]
    dual = congruence_lattice(p, la.transpose(R), neg_id)
    info: dict = {"raw": (dual.form.P, dual.form.Q)}
    if L.block is not None:
        A, A_prime, z = L.block.A, L.block.A_prime, L.block.z
        M = block_mult_matrix(z)
        inv_t = la.transpose(la.mat_inv(A, p))
        P0 = la.mat_mul(la.transpose(M), inv_t, p)
        Q0 = la.mat_neg(la.transpose(la.mat_inv(A_prime, p)), p)
        alt = congruence_lattice(p, P0, Q0)
        assert alt.basis == dual.basis
        C = block_symmetrizer(z)
        A2 = la.mat_neg(
            la.transpose(la.mat_inv(la.mat_mul(la.mat_inv(C, p), A_prime, p), p)), p
        )
        A3 = la.mat_mul(la.transpose(C), inv_t, p)
        structured = congruence_lattice(p, la.mat_mul(M, A3, p), A2)
        assert structured.basis == dual.basis
        info["structured"] = (A2, A3, C)
    dual_pairing_check(L, dual)
    if report:
        return dual, info
    return dual


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _triangular_columns(L: IntegerLattice) -> list[tuple[int, ...]]:
    cols = L.columns()
    d = L.dim
    if all(cols[j][j] > 0 for j in range(d)) and all(
        cols[j][i] == 0 for j in range(d) for i in range(j)
    ):
        return cols
    return la.hnf_columns(cols, d)


def _coeff_points(L: IntegerLattice, W: Sequence[int]) -> list[tuple[int, ...]]:
    """All lattice vectors v with |v_i| <= W_i, by bounded column coefficients."""
    cols = _triangular_columns(L)
    d = L.dim
    out: list[tuple[int, ...]] = []
    v = [0] * d

    def rec(j: int) -> None:
        if j == d:
            out.append(tuple(v))
            return
        piv = cols[j][j]
        lo = _ceil_div(-W[j] - v[j], piv)
        hi = (W[j] - v[j]) // piv
        for c in range(lo, hi + 1):
            for i in range(j, d):
                v[i] += c * cols[j][i]
            rec(j + 1)
            for i in range(j, d):
                v[i] -= c * cols[j][i]

    rec(0)
    return out


def _scan_points(L: IntegerLattice, H: Sequence[int]) -> list[tuple[int, ...]]:
    member = L.form.holds if L.form is not None else L.contains
    return [
        v
        for v in itertools.product(*[range(-h, h + 1) for h in H])
        if member(v)
    ]


def points_in_box(L: IntegerLattice, H: Sequence[int], cross_check: bool | None = None):
    """Count and list the lattice vectors v with |v_i| <= H_i for all i.

    Counting runs over bounded basis coefficients; on small boxes the direct
    scan with the membership test is run as well and must agree.
    """
    H = tuple(int(h) for h in H)
    if len(H) != L.dim or any(h < 0 for h in H):
        raise ValueError("box bounds must be one nonnegative integer per dimension")
    vol = math.prod(2 * h + 1 for h in H)
    pts = sorted(_coeff_points(L, H))
    if cross_check is None:
        cross_check = vol <= CROSS_CHECK_CAP
    if cross_check:
        if vol > SCAN_CAP:
            raise ValueError(f"scan infeasible: box volume {vol} over cap {SCAN_CAP}")
        assert sorted(_scan_points(L, H)) == pts
    return len(pts), tuple(pts)


@dataclass(frozen=True)
class SuccessiveMinimaReport:
    minima: tuple[Fraction, ...]
    s: int
    vectors: tuple[tuple[int, ...], ...]


def _rank_increases(chosen: list[tuple[int, ...]], v: Sequence[int]) -> bool:
    rows = [[Fraction(t) for t in u] for u in chosen] + [[Fraction(t) for t in v]]
    r = 0
    for c in range(len(v)):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(r + 1, len(rows)):
            if rows[i][c]:
                f = rows[i][c] / rows[r][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
    return r == len(chosen) + 1


def successive_minima(
    L: IntegerLattice, H: Sequence[int], gauge: str = "box"
) -> SuccessiveMinimaReport:
    """Exact successive minima of a box (or its polar body) on the lattice.

    gauge "box": |v| = max_i |v_i| / H_i, the gauge of [-H, H].
    gauge "polar": |v| = sum_i H_i |v_i|, the gauge of the polar body.
    Minima are exact rationals with their achieving vectors; s counts those
    at most 1.  The product of the minima is checked against both sides of
    Minkowski's second theorem (explicit classical constants) on every call.
    """
    d = L.dim
    if d > MINIMA_DIM_CAP:
        raise ValueError(f"successive minima supported up to dimension {MINIMA_DIM_CAP}")
    H = tuple(int(h) for h in H)
    if len(H) != d or any(h <= 0 for h in H):
        raise ValueError("box sides must be positive")
    if gauge not in ("box", "polar"):
        raise ValueError(f"unknown gauge {gauge!r}")

    def measure(v) -> Fraction:
        if gauge == "box":
            return max(Fraction(abs(a), h) for a, h in zip(v, H))
        return Fraction(sum(h * abs(a) for a, h in zip(v, H)))

    radius = 1
    while True:
        W = [radius * h if gauge == "box" else radius // h for h in H]
        cand = [v for v in _coeff_points(L, W) if any(v) and measure(v) <= radius]
        cand.sort(key=lambda v: (measure(v), v))
        chosen: list[tuple[int, ...]] = []
        minima: list[Fraction] = []
        for v in cand:
            if _rank_increases(chosen, v):
                chosen.append(v)
                minima.append(measure(v))
                if len(chosen) == d:
                    break
        if len(chosen) == d:
            break
        radius *= 2

    det = L.det()
    if gauge == "box":
        vol = Fraction(math.prod(2 * h for h in H))
    else:
        vol = Fraction(2**d, math.factorial(d) * math.prod(H))
    ratio = vol * math.prod(minima, start=Fraction(1)) / det
    assert Fraction(2**d, math.factorial(d)) <= ratio <= 2**d, (
        f"minima product outside the Minkowski range: {ratio}"
    )
    s = sum(1 for lam in minima if lam <= 1)
    return SuccessiveMinimaReport(tuple(minima), s, tuple(chosen))


def mahler_check(L: IntegerLattice, H: Sequence[int]) -> dict:
    """Pair box minima with the dual's polar minima; products lie in [1, (d!)^2].

    The dual minima are taken on the p-scaled dual and divided back by p, so
    every intermediate quantity stays an exact rational.
    """
    d = L.dim
    rep = successive_minima(L, H, gauge="box")
    dual = dual_lattice(L)
    rep_dual = successive_minima(dual, H, gauge="polar")
    p = L.form.p
    dual_minima = tuple(lam / p for lam in rep_dual.minima)
    products = tuple(rep.minima[i] * dual_minima[d - 1 - i] for i in range(d))
    bound = Fraction(math.factorial(d) ** 2)
    for prod in products:
        assert 1 <= prod <= bound, f"transference product {prod} outside [1, {bound}]"
    return {"minima": rep.minima, "dual_minima": dual_minima, "products": products}


def box_count_ratio(L: IntegerLattice, H: Sequence[int], H_small: Sequence[int]) -> dict:
    """Exact nested-box counts plus the dilation-power comparison.

    The smaller count never exceeds the larger (containment, asserted).  The
    observed ratio against (H/H')^s, with s taken from the larger box, is
    reported as a fitted constant, not asserted.
    """
    H = tuple(int(h) for h in H)
    H_small = tuple(int(h) for h in H_small)
    if any(h <= 0 for h in H_small) or any(a > b for a, b in zip(H_small, H)):
        raise ValueError("smaller box must be positive and nested in the larger")
    big = points_in_box(L, H)[0]
    small = points_in_box(L, H_small)[0]
    assert small <= big
    rep = successive_minima(L, H)
    scale = Fraction(min(H), min(H_small)) ** rep.s
    return {
        "count_large": big,
        "count_small": small,
        "s": rep.s,
        "kappa": Fraction(big) / (scale * small),
    }


def coset_count_checks(p: int, M, b, window: Sequence[int], seed: int = 0, samples: int = 20) -> dict:
    """Exhaustive checks that shifted solution counts never beat centered ones.

    S(b; D) counts integer points x in D with M x = b mod p.  Shifted closed
    windows [N, N+W] are compared against the centered window [-W, W]; the
    symmetric count S(b; [-W, W]) is compared against S(0; [-2W, 2W]).  The
    worst ratio S(b; [-W, W]) / S(0; [-W, W]) over sampled b is reported, not
    bounded.
    """
    la.check_prime(p)
    rows, m = len(M), len(M[0])
    window = tuple(int(v) for v in window)
    if len(window) != m or any(v <= 0 for v in window):
        raise ValueError("window sides must be positive, one per column")

    def count(bvec, lows, highs) -> int:
        target = [v % p for v in bvec]
        total = 0
        for x in itertools.product(*[range(lo, hi + 1) for lo, hi in zip(lows, highs)]):
            if la.mat_vec(M, list(x), p) == target:
                total += 1
        return total

    centered = count([0] * rows, [-v for v in window], list(window))
    centered_double = count([0] * rows, [-2 * v for v in window], [2 * v for v in window])
    rng = random.Random(seed)
    shifted_max = 0
    ratio_max = Fraction(0)
    targets = [list(b)] + [[rng.randrange(p) for _ in range(rows)] for _ in range(samples)]
    for bvec in targets:
        for _ in range(samples):
            N = [rng.randrange(-p, p + 1) for _ in range(m)]
            c = count(bvec, N, [N_i + w for N_i, w in zip(N, window)])
            assert c <= centered
            shifted_max = max(shifted_max, c)
        sym = count(bvec, [-v for v in window], list(window))
        assert sym <= centered_double
        ratio_max = max(ratio_max, Fraction(sym, centered))
    return {
        "centered": centered,
        "centered_double": centered_double,
        "shifted_max": shifted_max,
        "ratio_max": ratio_max,
    }
