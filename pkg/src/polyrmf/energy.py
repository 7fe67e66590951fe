"""Exact multiplicative-energy counting for polynomial images.

The multiplicative energy of a finite set A is the number of ordered
quadruples (a1, a2, a3, a4) in A^4 with a1*a2 = a3*a4.  Here A is the
image P([N]_{a,q}) of an arithmetic progression, products are exact
signed big integers, and the count is split into

* argument-diagonal quadruples ({x1,x2} = {x1',x2'} as multisets),
  exactly 2*M^2 - M of them for M member arguments,
* value-diagonal quadruples (the value multisets coincide while the
  argument multisets differ; these appear for generalized even
  polynomials via P(x) = P(beta - x)),
* the genuinely nontrivial remainder.

Counting groups the M*(M+1)/2 canonical pair products by exact value
(ordered totals are reconstructed from weights 1 on the diagonal and 2
off it).  Products never pass through floats; an int64 fast path is used
only when the largest product provably fits.  Beyond the pair budget a
sort-merge mode spills fixed-size sorted runs to disk and merge-counts.
"""

from __future__ import annotations

import heapq
import pickle
import tempfile
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import exp, log, sqrt

import numpy as np

from .errors import BudgetError
from .polynomial import IntPolynomial, classify
from .sieve import FactorTable

DEFAULT_PAIR_BUDGET = 80_000_000
_RUN_ITEMS = 4_000_000
_PICKLE_BATCH = 65_536
# |v| <= 3e9 guarantees v1*v2 fits in int64.
_INT64_VALUE_LIMIT = 3_000_000_000


@dataclass(frozen=True)
class ProgressionRange:
    """The set {x in [1, N] : x = a (mod q)}; q = 1, a = 0 gives [N]."""

    N: int
    q: int = 1
    a: int = 0

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if not 0 <= self.a < self.q:
            raise ValueError("need 0 <= a < q")

    @property
    def indicator_a(self) -> int:
        return 1 if self.a == 0 else 0

    @property
    def size(self) -> int:
        if self.a == 0:
            return self.N // self.q
        return max(0, (self.N - self.a) // self.q + 1)

    def members(self) -> range:
        start = self.a if self.a >= 1 else self.q
        return range(start, self.N + 1, self.q)


@dataclass(frozen=True)
class EnergyReport:
    range: ProgressionRange
    polynomial: IntPolynomial
    total: int
    diagonal_arg: int
    value_diagonal: int
    nontrivial: int
    main_term: int  # 2*M^2 - M, the exact argument-diagonal baseline
    offdiag_exponent: Fraction | None
    offdiag_over_bound: float | None
    generalized_even_center: Fraction | None
    has_negative_values: bool
    zero_value_count: int
    mode: str  # "direct" or "chunked"


def error_exponent(degree: int) -> Fraction | None:
    """Off-diagonal growth exponent: 5/3 at degree 2, 2 - 1/(2(2d-1)) above."""
    if degree < 2:
        return None
    if degree == 2:
        return Fraction(5, 3)
    return 2 - Fraction(1, 2 * (2 * degree - 1))


def _canonical_pair_stream(values, block_rows: int = 64):
    """Yield (sorted products array-like, weights) blocks of canonical pairs.

    Canonical pairs are (i, j) with i <= j; weight 2 off the diagonal
    reconstructs ordered-pair multiplicities.
    """
    m = len(values)
    i = 0
    while i < m:
        rows = 0
        prods: list[int] = []
        weights: list[int] = []
        while i < m and rows < block_rows:
            vi = values[i]
            prods.append(vi * vi)
            weights.append(1)
            for j in range(i + 1, m):
                prods.append(vi * values[j])
                weights.append(2)
            rows += 1
            i += 1
        yield prods, weights


def _pair_total_int64(values: list[int]) -> int:
    m = len(values)
    vals = np.array(values, dtype=np.int64)
    total_pairs = m * (m + 1) // 2
    prods = np.empty(total_pairs, dtype=np.int64)
    weights = np.empty(total_pairs, dtype=np.int64)
    pos = 0
    for i in range(m):
        ln = m - i
        prods[pos:pos + ln] = vals[i] * vals[i:]
        weights[pos] = 1
        weights[pos + 1:pos + ln] = 2
        pos += ln
    order = np.argsort(prods, kind="stable")
    sp = prods[order]
    sw = weights[order]
    starts = np.r_[0, np.flatnonzero(np.diff(sp)) + 1]
    sums = np.add.reduceat(sw, starts)
    return int(np.sum(sums * sums))


def _pair_total_dict(values: list[int]) -> int:
    acc: Counter = Counter()
    m = len(values)
    for i in range(m):
        vi = values[i]
        acc[vi * vi] += 1
        for j in range(i + 1, m):
            acc[vi * values[j]] += 2
    return sum(c * c for c in acc.values())


def _pair_total_chunked(values: list[int], run_items: int = _RUN_ITEMS) -> int:
    """Sort-merge counting: spill sorted (product, weight) runs, merge-count."""
    run_files = []

    def flush(prods: list[int], weights: list[int]) -> None:
        order = sorted(range(len(prods)), key=prods.__getitem__)
        fh = tempfile.TemporaryFile()
        for lo in range(0, len(order), _PICKLE_BATCH):
            batch = [(prods[k], weights[k]) for k in order[lo:lo + _PICKLE_BATCH]]
            pickle.dump(batch, fh, protocol=pickle.HIGHEST_PROTOCOL)
        fh.seek(0)
        run_files.append(fh)

    buf_p: list[int] = []
    buf_w: list[int] = []
    for prods, weights in _canonical_pair_stream(values):
        buf_p.extend(prods)
        buf_w.extend(weights)
        if len(buf_p) >= run_items:
            flush(buf_p, buf_w)
            buf_p, buf_w = [], []
    if buf_p:
        flush(buf_p, buf_w)

    def run_iter(fh):
        while True:
            try:
                batch = pickle.load(fh)
            except EOFError:
                return
            yield from batch

    total = 0
    current = None
    wsum = 0
    for prod, w in heapq.merge(*(run_iter(fh) for fh in run_files)):
        if prod != current:
            total += wsum * wsum
            current = prod
            wsum = 0
        wsum += w
    total += wsum * wsum
    for fh in run_files:
        fh.close()
    return total


def count_pair_products(
    values: list[int],
    *,
    budget: int = DEFAULT_PAIR_BUDGET,
    chunked: bool = False,
) -> tuple[int, str]:
    """Sum of squared ordered-pair-product multiplicities, i.e. the energy.

    Returns (total, mode).  Raises BudgetError when the canonical pair
    count exceeds ``budget`` and chunked mode was not requested.
    """
    m = len(values)
    est = m * (m + 1) // 2
    if chunked:
        return _pair_total_chunked(values), "chunked"
    if est > budget:
        raise BudgetError(
            f"{est} canonical pair products exceed the budget of {budget}; "
            "enable chunked (sort-merge) counting or raise the budget"
        )
    if values and max(abs(v) for v in values) <= _INT64_VALUE_LIMIT and m > 64:
        return _pair_total_int64(values), "direct"
    return _pair_total_dict(values), "direct"


def energy(
    poly: IntPolynomial,
    rng: ProgressionRange,
    *,
    budget: int = DEFAULT_PAIR_BUDGET,
    chunked: bool = False,
) -> EnergyReport:
    """Exact multiplicative energy of P([N]_{a,q}) with diagonal splits."""
    members = list(rng.members())
    if not members:
        raise ValueError("progression has no members in [1, N]")
    values = [poly(x) for x in members]
    total, mode = count_pair_products(values, budget=budget, chunked=chunked)

    m = len(members)
    diag = 2 * m * m - m
    counts = Counter(values)
    s2 = sum(c * c for c in counts.values())
    s4 = sum(c ** 4 for c in counts.values())
    vd_total = 2 * s2 * s2 - s4  # quadruples whose value multisets coincide
    expo = error_exponent(poly.degree)
    offdiag = total - diag
    ratio = None if expo is None else offdiag / float(rng.N) ** float(expo)
    cls = classify(poly)
    return EnergyReport(
        range=rng,
        polynomial=poly,
        total=total,
        diagonal_arg=diag,
        value_diagonal=vd_total - diag,
        nontrivial=total - vd_total,
        main_term=diag,
        offdiag_exponent=expo,
        offdiag_over_bound=ratio,
        generalized_even_center=cls.generalized_even_center,
        has_negative_values=any(v < 0 for v in values),
        zero_value_count=sum(1 for v in values if v == 0),
        mode=mode,
    )


def energy_cross(
    poly1: IntPolynomial,
    poly2: IntPolynomial,
    rng: ProgressionRange,
    *,
    budget: int = DEFAULT_PAIR_BUDGET,
) -> int:
    """Count (x, y, X, Y) in members^4 with P1(x)P1(y) = P2(X)P2(Y)."""
    members = list(rng.members())
    if not members:
        raise ValueError("progression has no members in [1, N]")
    m = len(members)
    if m * (m + 1) // 2 > budget:
        raise BudgetError(f"{m * (m + 1) // 2} pair products exceed budget {budget}")

    def pair_counter(values: list[int]) -> Counter:
        acc: Counter = Counter()
        for i in range(len(values)):
            vi = values[i]
            acc[vi * vi] += 1
            for j in range(i + 1, len(values)):
                acc[vi * values[j]] += 2
        return acc

    c1 = pair_counter([poly1(x) for x in members])
    c2 = pair_counter([poly2(x) for x in members])
    if len(c2) < len(c1):
        c1, c2 = c2, c1
    return sum(mult * c2[v] for v, mult in c1.items())


@dataclass(frozen=True)
class PairedPrimeCount:
    """Quadruple counts with pairwise-matching largest prime factors.

    Counts (n1, n2, n3, n4) with P+(P(n1)) = P+(P(n2)), P+(P(n3)) =
    P+(P(n4)) and P(n1)P(n3) = P(n2)P(n4), split by whether the two
    largest primes coincide.  Rows with |P(n)| <= 1 belong to no group.
    """

    total: int
    same_prime: int
    distinct_prime: int


def lpf_groups(table: FactorTable, n_max: int | None = None) -> dict[int, list[int]]:
    """Group values P(n), n <= n_max, by largest prime factor (> 0 only)."""
    n_max = table.N if n_max is None else n_max
    if n_max > table.N:
        raise ValueError("table does not cover the requested range")
    groups: dict[int, list[int]] = {}
    for row in table.rows[:n_max]:
        if row.largest_prime > 0:
            groups.setdefault(row.largest_prime, []).append(row.value)
    return groups


def energy_constrained_lpf(
    table: FactorTable,
    mode: str,
    n_max: int | None = None,
) -> int | PairedPrimeCount:
    """Energy counts restricted by largest-prime-factor constraints.

    mode "same-prime-all-four": quadruples with product equality whose four
    largest primes all agree, summed over the shared prime.

    mode "paired-primes": see :class:`PairedPrimeCount`.
    """
    groups = lpf_groups(table, n_max)
    if mode == "same-prime-all-four":
        total = 0
        for values in groups.values():
            acc: Counter = Counter()
            for v in values:
                for w in values:
                    acc[v * w] += 1
            total += sum(c * c for c in acc.values())
        return total
    if mode == "paired-primes":
        # Ordered pairs within a group, keyed by the exact value ratio.
        # (n1,n2) from group p and (n3,n4) from group q solve
        # P(n1)P(n3) = P(n2)P(n4) iff ratio(n1,n2) = ratio(n4,n3), and the
        # swap bijection makes per-ratio counts symmetric under inversion.
        per_group: dict[int, Counter] = {}
        combined: Counter = Counter()
        for p, values in groups.items():
            ctr: Counter = Counter()
            for v in values:
                for w in values:
                    ctr[Fraction(v, w)] += 1
            per_group[p] = ctr
            combined.update(ctr)
        total = sum(c * c for c in combined.values())
        same = sum(
            c * c for ctr in per_group.values() for c in ctr.values()
        )
        return PairedPrimeCount(
            total=total, same_prime=same, distinct_prime=total - same
        )
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class ExponentFitPoint:
    N: int
    offdiag: int
    ratio: float


@dataclass(frozen=True)
class ExponentFit:
    points: tuple[ExponentFitPoint, ...]
    exponent: Fraction
    slope: float | None  # log-log least squares of offdiag vs N


def exponent_fit(
    poly: IntPolynomial,
    grid: list[int],
    *,
    q: int = 1,
    a: int = 0,
    budget: int = DEFAULT_PAIR_BUDGET,
    chunked: bool = False,
) -> ExponentFit:
    """Off-diagonal counts across a grid of N, normalized by N^exponent."""
    cls = classify(poly)
    if cls.is_pure_power:
        w = cls.pure_power_witness
        raise ValueError(
            f"polynomial {poly} is the excluded pure power w*(x+c)^d "
            f"(w={w.w}, c={w.c}); its off-diagonal asymptotics degenerate"
        )
    if poly.degree < 2:
        raise ValueError("degree must be >= 2 for an exponent fit")
    if list(grid) != sorted(set(grid)):
        raise ValueError("grid must be strictly ascending")
    expo = error_exponent(poly.degree)
    points = []
    for n in grid:
        rep = energy(poly, ProgressionRange(n, q, a), budget=budget, chunked=chunked)
        offdiag = rep.total - rep.diagonal_arg
        points.append(
            ExponentFitPoint(N=n, offdiag=offdiag, ratio=offdiag / n ** float(expo))
        )
    xs = [log(pt.N) for pt in points if pt.offdiag > 0]
    ys = [log(pt.offdiag) for pt in points if pt.offdiag > 0]
    slope = None
    if len(xs) >= 2:
        mx = sum(xs) / len(xs)
        my = sum(ys) / len(ys)
        denom = sum((x - mx) ** 2 for x in xs)
        if denom > 0:
            slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / denom
    return ExponentFit(points=tuple(points), exponent=expo, slope=slope)


@dataclass(frozen=True)
class IntegralPointBound:
    """N^(1/d) * exp(12 * sqrt(d ln N ln ln N)) with its validity flag.

    ``asymptotic_regime`` records whether N >= exp(d^6), the regime in
    which the bound is stated; below it the number is still computed as
    a trend reference.
    """

    degree: int
    N: int
    value: float
    asymptotic_regime: bool


def bp_bound(degree: int, n: int) -> IntegralPointBound:
    if degree < 2:
        raise ValueError("degree must be >= 2")
    if n <= 15:
        raise ValueError("need N >= 16 so that ln ln N is safely positive")
    value = n ** (1.0 / degree) * exp(12.0 * sqrt(degree * log(n) * log(log(n))))
    return IntegralPointBound(
        degree=degree, N=n, value=value, asymptotic_regime=log(n) >= degree ** 6
    )
