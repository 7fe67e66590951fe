"""Monte-Carlo and exact audits of the Gaussian limit for sums of f(P(n)).

The Monte-Carlo side draws R independent replicates of
X = N^(-1/2) * sum_{n<=N} f(P(n)) and reports moment statistics plus
Kolmogorov-Smirnov distances of Re X and Im X against a mean-0,
variance-1/2 normal.

The deterministic side audits the three martingale-CLT conditions for
the pieces M_p = Re[(N/2)^(-1/2) * sum_{n<=N, lpf(P(n))=p} f(P(n))]
as exact rational counts.  Expectations of products of f-values reduce,
by orthogonality of independent unit-circle phases, to counting
solutions of multiplicative equations among the |P(n)|: a product of
f's and conjugates has expectation 1 exactly when the unconjugated and
conjugated value products agree, else 0.  All surviving orthogonality
classes are enumerated, so the rational outputs are exact:

* variance_sum   = sum_p E M_p^2
                 = (1/N) * #{(n1,n2) in group_p^2 : |P(n1)| = |P(n2)|}
* lindeberg_sum  = sum_p E M_p^4
                 = sum_p (6*C22_p + 8*C31_p) / (4 N^2)
  with C22 = #{v1 v2 = v3 v4} and C31 = #{v1 v2 v3 = v4} inside group p
  (the all-unconjugated class #{v1 v2 v3 v4 = 1} vanishes: group values
  are >= 2),
* cross_term     = sum_{p != q} E M_p^2 M_q^2
                 = (D + 2 A) / N^2
  where D counts v1 w1 = v2 w2 with v's in group p, w's in group q,
  p != q, and A counts the rarer class v1 v2 w1 = w2 across distinct
  groups (its mirror contributes the factor 2).

Normalization convention: the summation pieces themselves are raw
complex sums; every 1/sqrt(N) or 1/sqrt(N/2) factor is applied here at
the audit layer.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import erf, sqrt

import numpy as np

from .polynomial import IntPolynomial, classify
from .energy import lpf_groups
from .rmf import M64, PhaseTable, angles_for_key, derive_seed, mix64
from .sieve import FactorTable, factor_values

_CHUNK = 512


def normal_cdf_half_variance(x: float) -> float:
    """CDF of N(0, 1/2); the variance makes this (1 + erf(x)) / 2."""
    return 0.5 * (1.0 + erf(x))


def ks_statistic(samples: np.ndarray, cdf=normal_cdf_half_variance) -> float:
    """One-sample Kolmogorov-Smirnov distance against a reference CDF."""
    xs = np.sort(np.asarray(samples, dtype=np.float64))
    n = len(xs)
    cdf_vals = np.array([cdf(x) for x in xs])
    upper = np.max(np.arange(1, n + 1) / n - cdf_vals)
    lower = np.max(cdf_vals - np.arange(0, n) / n)
    return float(max(upper, lower))


@dataclass(frozen=True)
class CltStats:
    n_samples: int
    mean_re: float
    mean_im: float
    var_re: float
    var_im: float
    cov_re_im: float
    abs2_mean: float
    abs2_se: float
    abs4_mean: float
    abs4_se: float
    ks_re: float
    ks_im: float
    exact_second_moment: Fraction  # #{(n1,n2): |P(n1)|=|P(n2)|, nonzero} / N
    small_value_count: int  # n <= N with |P(n)| <= 1 (contribute constant 1)
    zero_value_count: int


@dataclass(frozen=True)
class CltRun:
    polynomial: IntPolynomial
    N: int
    reps: int
    seed: int
    samples: np.ndarray
    stats: CltStats


def _replicate_keys(seed: int, reps: int) -> list[int]:
    return [mix64(derive_seed(seed, r) & M64) for r in range(reps)]


def _batch_sums(pt: PhaseTable, keys: list[int], rotation: float) -> np.ndarray:
    theta = np.empty((len(pt.primes), len(keys)), dtype=np.float64)
    for b, key in enumerate(keys):
        theta[:, b] = angles_for_key(key, pt.primes_u64)
    z = pt.unit_values_batch(theta, rotation)
    return z.sum(axis=0)


def sample_normalized_sums(
    pt: PhaseTable,
    n_max: int,
    seed: int,
    reps: int,
    *,
    threads: int = 1,
    rotation: float = 0.0,
) -> np.ndarray:
    """R replicates of N^(-1/2) sum_{n<=N} f(P(n)), reproducibly.

    Replicates are evaluated in fixed-size chunks whose boundaries do not
    depend on the thread count, and chunk results are concatenated in
    chunk order, so outputs are bit-identical for any ``threads``.
    """
    keys = _replicate_keys(seed, reps)
    chunks = [keys[lo:lo + _CHUNK] for lo in range(0, reps, _CHUNK)]
    if threads <= 1:
        parts = [_batch_sums(pt, chunk, rotation) for chunk in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda ch: _batch_sums(pt, ch, rotation), chunks))
    return np.concatenate(parts) / sqrt(n_max)


def run_clt(
    poly: IntPolynomial,
    n_max: int,
    reps: int,
    seed: int,
    *,
    threads: int = 1,
    table: FactorTable | None = None,
    rotation: float = 0.0,
) -> CltRun:
    """Monte-Carlo sample of the normalized partial sums with statistics."""
    cls = classify(poly)
    if not cls.clt_admissible:
        if cls.is_pure_power:
            w = cls.pure_power_witness
            raise ValueError(
                f"polynomial {poly} is the excluded pure power w*(x+c)^d "
                f"(w={w.w}, c={w.c}); its normalized sums degenerate"
            )
        raise ValueError("degree must be >= 2")
    if reps < 100:
        raise ValueError("need at least 100 replicates")
    if table is None:
        table = factor_values(poly, n_max)
    pt = PhaseTable(table, n_max)
    samples = sample_normalized_sums(
        pt, n_max, seed, reps, threads=threads, rotation=rotation
    )

    re, im = samples.real, samples.imag
    abs2 = re * re + im * im
    abs4 = abs2 * abs2
    counts = Counter(
        abs(row.value) for row in table.rows[:n_max] if row.value != 0
    )
    exact_second = Fraction(sum(c * c for c in counts.values()), n_max)
    small = sum(1 for row in table.rows[:n_max] if abs(row.value) == 1)
    zeros = sum(1 for row in table.rows[:n_max] if row.value == 0)
    stats = CltStats(
        n_samples=reps,
        mean_re=float(np.mean(re)),
        mean_im=float(np.mean(im)),
        var_re=float(np.var(re, ddof=1)),
        var_im=float(np.var(im, ddof=1)),
        cov_re_im=float(
            np.sum((re - np.mean(re)) * (im - np.mean(im))) / (reps - 1)
        ),
        abs2_mean=float(np.mean(abs2)),
        abs2_se=float(np.std(abs2, ddof=1) / sqrt(reps)),
        abs4_mean=float(np.mean(abs4)),
        abs4_se=float(np.std(abs4, ddof=1) / sqrt(reps)),
        ks_re=ks_statistic(re),
        ks_im=ks_statistic(im),
        exact_second_moment=exact_second,
        small_value_count=small,
        zero_value_count=zeros,
    )
    return CltRun(
        polynomial=poly, N=n_max, reps=reps, seed=seed, samples=samples, stats=stats
    )


@dataclass(frozen=True)
class McLeishScale:
    N: int
    variance_sum: Fraction
    lindeberg_sum: Fraction
    cross_term: Fraction
    small_value_count: int


@dataclass(frozen=True)
class McLeishAudit:
    polynomial: IntPolynomial
    scales: tuple[McLeishScale, ...]


def _group_moments(values: list[int]) -> tuple[int, int, int]:
    """(equal-value pairs, C22, C31) for one largest-prime group.

    Values enter by absolute value (that is where f lives); they are all
    >= 2 inside a prime group, so the all-unconjugated classes vanish.
    """
    vs = [abs(v) for v in values]
    value_counts = Counter(vs)
    eq_pairs = sum(c * c for c in value_counts.values())
    pair_counts: Counter = Counter()
    for v in vs:
        for w in vs:
            pair_counts[v * w] += 1
    c22 = sum(c * c for c in pair_counts.values())
    c31 = 0
    for v in vs:
        for w in vs:
            vw = v * w
            for u in vs:
                c31 += value_counts.get(vw * u, 0)
    return eq_pairs, c22, c31


def _cross_class_a(groups: dict[int, list[int]]) -> int:
    """#{v1*v2*w1 = w2 : v's in group p, w's in group q, p != q}."""
    pair_by_group: dict[int, Counter] = {}
    pair_all: Counter = Counter()
    for p, values in groups.items():
        ctr: Counter = Counter()
        for v in values:
            av = abs(v)
            for w in values:
                ctr[av * abs(w)] += 1
        pair_by_group[p] = ctr
        pair_all.update(ctr)
    total = 0
    for q, values in groups.items():
        own = pair_by_group[q]
        for w1 in values:
            a1 = abs(w1)
            for w2 in values:
                a2 = abs(w2)
                if a2 % a1 == 0:
                    m = a2 // a1
                    total += pair_all.get(m, 0) - own.get(m, 0)
    return total


def _cross_class_d(groups: dict[int, list[int]]) -> int:
    """#{v1*w1 = v2*w2 : v's in group p, w's in group q, p != q}."""
    ratio_by_group: dict[int, Counter] = {}
    ratio_all: Counter = Counter()
    for p, values in groups.items():
        ctr: Counter = Counter()
        for v in values:
            av = abs(v)
            for w in values:
                ctr[Fraction(av, abs(w))] += 1
        ratio_by_group[p] = ctr
        ratio_all.update(ctr)
    total = sum(c * c for c in ratio_all.values())
    same = sum(c * c for ctr in ratio_by_group.values() for c in ctr.values())
    return total - same


def mcleish_audit(
    poly: IntPolynomial, table: FactorTable, grid: list[int]
) -> McLeishAudit:
    """Exact martingale-condition sums at each N of the grid."""
    if max(grid) > table.N:
        raise ValueError("table does not cover the audit grid")
    scales = []
    for n_max in grid:
        groups = lpf_groups(table, n_max)
        eq_total = 0
        lindeberg = Fraction(0)
        for values in groups.values():
            eq, c22, c31 = _group_moments(values)
            eq_total += eq
            lindeberg += Fraction(6 * c22 + 8 * c31, 4 * n_max * n_max)
        d_count = _cross_class_d(groups)
        a_count = _cross_class_a(groups)
        cross = Fraction(d_count + 2 * a_count, n_max * n_max)
        small = sum(
            1 for row in table.rows[:n_max] if abs(row.value) <= 1
        )
        scales.append(
            McLeishScale(
                N=n_max,
                variance_sum=Fraction(eq_total, n_max),
                lindeberg_sum=lindeberg,
                cross_term=cross,
                small_value_count=small,
            )
        )
    return McLeishAudit(polynomial=poly, scales=tuple(scales))
