"""Exact finite distributions for the binomial domination and tail claims.

Distributions on ``0..k`` are held as exact ``Fraction`` masses when the
number of underlying fair coins is at most ``EXACT_LIMIT``; beyond that as
floats together with an accumulated absolute error bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np

EXACT_LIMIT = 64
_ULP = 2.0 ** -52


@dataclass(frozen=True)
class ExactDistribution:
    mass: tuple  # Fractions (exact) or floats
    exact: bool = True
    error: float = 0.0  # absolute error bound on each CDF value (float mode)

    def __post_init__(self):
        if not self.mass:
            raise ValueError("distribution needs a non-empty support")
        if any(p < 0 for p in self.mass):
            raise ValueError("masses must be non-negative")
        total = sum(self.mass)
        if self.exact and total != 1:
            raise ValueError(f"masses sum to {total}, not 1")
        if not self.exact and abs(total - 1.0) > 1e-12 + self.error:
            raise ValueError(f"masses sum to {total}, not 1")

    @classmethod
    def point(cls, k: int) -> "ExactDistribution":
        return cls(tuple([Fraction(0)] * k + [Fraction(1)]))

    @property
    def top(self) -> int:
        return len(self.mass) - 1

    def pmf(self, k: int):
        return self.mass[k] if 0 <= k <= self.top else (Fraction(0) if self.exact else 0.0)

    def cdf(self) -> list:
        out, acc = [], Fraction(0) if self.exact else 0.0
        for p in self.mass:
            acc += p
            out.append(acc)
        return out

    def prob_below(self, x: float):
        """P(X < x)."""
        acc = Fraction(0) if self.exact else 0.0
        for k, p in enumerate(self.mass):
            if k < x:
                acc += p
        return acc

    def mean(self):
        return sum(k * p for k, p in enumerate(self.mass))

    def as_float(self) -> "ExactDistribution":
        if not self.exact:
            return self
        return ExactDistribution(tuple(float(p) for p in self.mass), False, len(self.mass) * _ULP)


def binomial_half(m: int, exact: bool | None = None) -> ExactDistribution:
    """Bin(m, 1/2)."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if exact is None:
        exact = m <= EXACT_LIMIT
    if exact:
        denom = 1 << m
        return ExactDistribution(tuple(Fraction(math.comb(m, k), denom) for k in range(m + 1)))
    ks = np.arange(m + 1)
    logs = (math.lgamma(m + 1) - np.array([math.lgamma(k + 1) + math.lgamma(m - k + 1) for k in ks])
            - m * math.log(2))
    mass = np.exp(logs)
    # lgamma differences carry roughly m ulps of relative error per term
    err = float((m + 8) * _ULP * (m + 1))
    return ExactDistribution(tuple(float(x) for x in mass), False, err)


def folded_min(m: int, exact: bool | None = None) -> ExactDistribution:
    """min(Y, m - Y) for Y ~ Bin(m, 1/2)."""
    if m < 1:
        raise ValueError("m must be at least 1")
    y = binomial_half(m, exact)
    half = m // 2
    zero = Fraction(0) if y.exact else 0.0
    mass = [zero] * (half + 1)
    for k, p in enumerate(y.mass):
        mass[min(k, m - k)] += p
    return ExactDistribution(tuple(mass), y.exact, y.error * 2)


def dominates(a: ExactDistribution, b: ExactDistribution) -> bool:
    """``a`` stochastically dominates ``b``: CDF_a <= CDF_b everywhere."""
    top = max(a.top, b.top)
    ca, cb = a.cdf(), b.cdf()
    tol = 0 if (a.exact and b.exact) else a.error + b.error
    for k in range(top + 1):
        fa = ca[min(k, a.top)]
        fb = cb[min(k, b.top)]
        if fa > fb + tol:
            return False
    return True


def convolve(dists: Sequence[ExactDistribution]) -> ExactDistribution:
    """Distribution of the sum of independent variables."""
    dists = list(dists)
    if not dists:
        return ExactDistribution.point(0)
    out = dists[0]
    for d in dists[1:]:
        out = _convolve2(out, d)
    return out


def _convolve2(a: ExactDistribution, b: ExactDistribution) -> ExactDistribution:
    exact = a.exact and b.exact
    if not exact:
        a, b = a.as_float(), b.as_float()
        mass = np.convolve(np.asarray(a.mass, dtype=float), np.asarray(b.mass, dtype=float))
        return ExactDistribution(tuple(float(x) for x in mass), False, a.error + b.error + len(mass) * _ULP)
    mass = [Fraction(0)] * (a.top + b.top + 1)
    for i, p in enumerate(a.mass):
        if p:
            for j, q in enumerate(b.mass):
                if q:
                    mass[i + j] += p * q
    return ExactDistribution(tuple(mass))


# ----------------------------------------------------------------------------
# claim checks


def folded_sum_by_enumeration(ms: Sequence[int]) -> ExactDistribution:
    """Sum of min(Y_i, m_i - Y_i) by listing all 2^(sum m_i) coin outcomes."""
    total = sum(ms)
    outcomes = np.arange(1 << total, dtype=np.int64)
    x = np.zeros(len(outcomes), dtype=np.int64)
    shift = 0
    for m in ms:
        block = (outcomes >> shift) & ((1 << m) - 1)
        y = np.bitwise_count(block).astype(np.int64)
        x += np.minimum(y, m - y)
        shift += m
    counts = np.bincount(x)
    denom = 1 << total
    return ExactDistribution(tuple(Fraction(int(c), denom) for c in counts))


@dataclass(frozen=True)
class ClaimRow:
    claim: str
    ms: tuple[int, ...]
    holds: bool
    detail: str = ""

    def csv(self) -> str:
        return f"{self.claim},{' '.join(map(str, self.ms))},{int(self.holds)},{self.detail}"


def check_domination(max_m: int = EXACT_LIMIT) -> list[ClaimRow]:
    """folded_min(m) dominates Bin(floor(m/2), 1/2) for 1 <= m <= max_m."""
    return [ClaimRow("domin", (m,), dominates(folded_min(m), binomial_half(m // 2))) for m in range(1, max_m + 1)]


def compositions(total: int) -> Iterable[tuple[int, ...]]:
    """All tuples of positive integers with the given sum."""
    if total == 0:
        yield ()
        return
    for first in range(1, total + 1):
        for rest in compositions(total - first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _coupling_multiset(ms: tuple[int, ...]) -> tuple[bool, bool]:
    conv = convolve([folded_min(m) for m in ms])
    enum = folded_sum_by_enumeration(ms)
    target = binomial_half(sum(m // 2 for m in ms))
    return conv == enum, dominates(conv, target)


def check_coupling(max_total: int = 16) -> list[ClaimRow]:
    """Every tuple with sum <= max_total: convolution equals enumeration and dominates the binomial.

    The sum of independent terms does not depend on their order, so each
    composition is checked through its sorted multiset.
    """
    rows = []
    for total in range(1, max_total + 1):
        for ms in compositions(total):
            same, dom = _coupling_multiset(tuple(sorted(ms)))
            rows.append(ClaimRow("coupling", ms, same and dom,
                                 "" if same else "enumeration mismatch"))
    return rows


@dataclass(frozen=True)
class Sized1Tail:
    trials: int
    threshold: float
    tail: float | Fraction
    bound: float
    log_n: float

    @property
    def bound_holds(self) -> bool:
        return self.tail <= self.bound

    @property
    def log10_tail(self) -> float:
        if self.tail == 0:
            return -math.inf
        t = Fraction(self.tail)
        return math.log10(t.numerator) - math.log10(t.denominator)

    def to_json(self) -> dict:
        return {"trials": self.trials, "threshold": self.threshold, "tail": float(self.tail), "log10_tail": self.log10_tail,
                "bound": self.bound, "log_n": self.log_n, "bound_holds": self.bound_holds}


def sized1_tail(
    n: float | None = None,
    *,
    log_n: float | None = None,
    trials: int | None = None,
    threshold: float | None = None,
) -> Sized1Tail:
    """P(Bin(trials, 1/2) < threshold) next to the claimed bound n^(-1/300).

    Defaults: ``trials = floor(log n / 202)``, ``threshold = 2 (log log n)^2``.
    ``log_n`` may be passed instead of ``n`` for astronomically large ``n``.
    """
    if log_n is None:
        if n is None:
            raise ValueError("give n or log_n")
        if n < 16:
            raise ValueError("n must be at least 16")
        log_n = math.log(n)
    if trials is None:
        trials = math.floor(log_n / 202)
    if threshold is None:
        threshold = 2 * math.log(log_n) ** 2
    # exact even for large trials: the tails of interest underflow doubles
    dist = binomial_half(trials, exact=True)
    tail = dist.prob_below(threshold)
    return Sized1Tail(trials, threshold, tail, math.exp(-log_n / 300), log_n)


def enumerate_folded(m: int) -> ExactDistribution:
    """Oracle for ``folded_min``: walk every one of the 2^m outcomes."""
    counts = [0] * (m // 2 + 1)
    for bits in product((0, 1), repeat=m):
        y = sum(bits)
        counts[min(y, m - y)] += 1
    return ExactDistribution(tuple(Fraction(c, 1 << m) for c in counts))
