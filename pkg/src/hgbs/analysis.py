"""Closed-form models: traffic weights, connectivity, memory, computation,
communication, compromise probability, blocked traffic and the connectivity
of the compared schemes.

Everything that is an exact identity is computed with ``Fraction``. The
binomial tail and large key pools fall back to log-space floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .errors import ParamDomain
from .keying import DegreePolicy
from .topology import GridParams

MEMORY_MODELS = ("M1", "M2", "M3", "M3_EXACT")
SCHEMES = ("hgbs", "gbs", "gbs3d", "plat", "eg", "cps", "ddhv")
WORD_MULTS = {"schoolbook_64": 64, "karatsuba_64": 27, "mixed_16x64": 16}


@dataclass(frozen=True)
class TrafficModel:
    """Share of traffic p_i whose endpoints first meet at order i.

    ``geometric`` is the normalized series c / 2^(i-1); ``geometric-raw``
    keeps p_i = 1 / 2^(i-1) without normalization.
    """

    n: int
    kind: str
    weights: tuple[Fraction, ...]
    beta: float = 1.0

    def __post_init__(self):
        if len(self.weights) != self.n:
            raise ParamDomain(f"{len(self.weights)} weights for n={self.n}")
        if self.kind == "geometric" and sum(self.weights) != 1:
            raise ParamDomain("normalized traffic weights must sum to 1")
        if not 1 <= self.beta <= 2:
            raise ParamDomain(f"beta must be in [1, 2], got {self.beta}")

    def p(self, i: int) -> Fraction:
        return self.weights[i - 1]


def ctf_weights(n: int, normalized: bool = True, beta: float = 1.0) -> TrafficModel:
    if n < 1:
        raise ParamDomain("n must be at least 1")
    raw = tuple(Fraction(1, 2 ** (i - 1)) for i in range(1, n + 1))
    if not normalized:
        return TrafficModel(n, "geometric-raw", raw, beta)
    c = Fraction(2 ** (n - 1), 2**n - 1)
    return TrafficModel(n, "geometric", tuple(c * w for w in raw), beta)


def connectivity_pz(z: int, n: int, m: int) -> tuple[Fraction, Fraction]:
    """Probability that two random nodes both fall in one given order-z grid,
    together with the upper bound (2^(z-n))^2."""
    if not 1 <= z <= n:
        raise ParamDomain(f"z={z} outside [1, {n}]")
    if m < 2:
        raise ParamDomain("m must be at least 2")
    inside = 2 ** (z - 1) * m
    total = 2 ** (n - 1) * m
    pz = Fraction(inside * (inside - 1), total * (total - 1))
    bound = Fraction(1, 2 ** (n - z)) ** 2
    assert pz <= bound
    return pz, bound


def connectivity_order(i: int, n: int, beta: float = 1.0) -> float:
    if not 1 <= i <= n:
        raise ParamDomain(f"order {i} outside [1, {n}]")
    if not 1 <= beta <= 2:
        raise ParamDomain(f"beta must be in [1, 2], got {beta}")
    return 2.0 ** ((i - n) * beta)


class MemoryCost(NamedTuple):
    bits: float
    bits_exact: int


def _ceil_lg(x: Fraction) -> int:
    if x <= 0:
        raise ParamDomain("logarithm of a non-positive value")
    e = 0
    while Fraction(2) ** e < x:
        e += 1
    while e > 0 and Fraction(2) ** (e - 1) >= x:
        e -= 1
    return e


def memory_cost(N: int, n: int, alpha: float, lg_q: float, model: str = "M1") -> MemoryCost:
    """Per-node memory in bits.

    ``bits`` evaluates the formula with the real-valued degree alpha*N/2^(n-1);
    ``bits_exact`` uses t0 = floor(alpha*m) with t0+1 stored coefficients,
    rounded up to whole bits. M3 keeps the printed (n+1)-term series sum,
    M3_EXACT the n-term one.
    """
    if model not in MEMORY_MODELS:
        raise ParamDomain(f"model {model!r} not in {MEMORY_MODELS}")
    if N < 1 or n < 1 or not 0 < alpha <= 1:
        raise ParamDomain("need N >= 1, n >= 1 and 0 < alpha <= 1")
    a = Fraction(str(alpha))
    m = Fraction(N, 2 ** (n - 1))
    t0 = max(1, math.floor(a * m))
    id_bits = n + _ceil_lg(m)
    lq = Fraction(str(lg_q))
    if model in ("M1", "M2"):
        count = n if model == "M1" else 2**n - 1
        literal = id_bits + count * (a * m + 1) * lq
        exact = id_bits + count * (t0 + 1) * lq
    else:
        terms = n + 1 if model == "M3" else n
        series = (1 - Fraction(1, 2**terms)) / Fraction(1, 2)
        literal = a * N * lq * series
        exact = 2 ** (n - 1) * t0 * lq * series
    return MemoryCost(float(literal), math.ceil(exact))


@dataclass(frozen=True)
class CostModel:
    """Evaluation of a degree-t share costs 2t field multiplications; ``cmp_cost``
    is the cost of comparing the two path identifiers."""

    cmp_cost: int = 0
    word_mults: dict[str, int] = field(default_factory=lambda: dict(WORD_MULTS))

    def mults_per_eval(self, t: int) -> int:
        return 2 * t


class ComputeCost(NamedTuple):
    field_mults: Fraction
    word_mults: Fraction


def compute_cost(
    policy: DegreePolicy, traffic: TrafficModel, cost: CostModel, word: str = "karatsuba_64"
) -> ComputeCost:
    """Average multiplications per key: sum_i p_i * 2 t_i + c."""
    if word not in cost.word_mults:
        raise ParamDomain(f"word multiplication {word!r} not in {sorted(cost.word_mults)}")
    avg = sum(
        (traffic.p(i) * cost.mults_per_eval(policy.degree(i)) for i in range(1, traffic.n + 1)),
        Fraction(0),
    )
    avg += cost.cmp_cost
    return ComputeCost(avg, avg * cost.word_mults[word])


def communication_cost(grid: GridParams) -> dict[str, float]:
    """Bits exchanged per key establishment: the peer's identifier."""
    return {"id_bits": grid.id_bits, "lg_N": math.log2(grid.N)}


def _check_prob_args(N_c: int, m: int, N: int):
    if not 0 <= N_c <= N or not 0 < m <= N:
        raise ParamDomain(f"need 0 <= N_c <= N and 0 < m <= N (N_c={N_c}, m={m}, N={N})")


def resiliency_pr(N_c: int, t0: int, m: int, N: int, threshold: int | None = None) -> float:
    """P[Binomial(N_c, m/N) >= threshold], threshold defaulting to t0.

    Equals 1 - sum_{i<threshold} C(N_c,i)(m/N)^i((N-m)/N)^(N_c-i); the upper
    tail is summed directly in log space so tiny values keep their precision.
    """
    _check_prob_args(N_c, m, N)
    if t0 < 1:
        raise ParamDomain("t0 must be at least 1")
    thr = t0 if threshold is None else threshold
    if N_c < thr:
        return 0.0
    if thr <= 0:
        return 1.0
    if m == N:
        return 1.0
    lp, lq = math.log(m / N), math.log1p(-m / N)
    logs = [
        math.lgamma(N_c + 1) - math.lgamma(i + 1) - math.lgamma(N_c - i + 1) + i * lp + (N_c - i) * lq
        for i in range(thr, N_c + 1)
    ]
    top = max(logs)
    return min(1.0, math.exp(top) * math.fsum(math.exp(v - top) for v in logs))


def resiliency_pr_exact(N_c: int, t0: int, m: int, N: int, threshold: int | None = None) -> Fraction:
    """Rational evaluation of the same binomial tail, for cross-checking."""
    _check_prob_args(N_c, m, N)
    thr = t0 if threshold is None else threshold
    p = Fraction(m, N)
    below = sum(
        (math.comb(N_c, i) * p**i * (1 - p) ** (N_c - i) for i in range(min(thr, N_c + 1))),
        Fraction(0),
    )
    return 1 - below


def zone_break_exact(N_c: int, threshold: int, m: int, N: int) -> Fraction:
    """P[at least ``threshold`` of N_c distinct compromised nodes lie in one
    given zone of m nodes] -- the hypergeometric tail."""
    _check_prob_args(N_c, m, N)
    total = math.comb(N, N_c)
    hits = sum(math.comb(m, i) * math.comb(N - m, N_c - i) for i in range(max(threshold, 0), min(m, N_c) + 1))
    return Fraction(hits, total)


def expected_random_break_budget(threshold: int, m: int, N: int) -> Fraction:
    """Expected number of uniformly random distinct compromises until a given
    zone has ``threshold`` members revealed: threshold * (N+1) / (m+1)."""
    if not 1 <= threshold <= m <= N:
        raise ParamDomain("need 1 <= threshold <= m <= N")
    return Fraction(threshold * (N + 1), m + 1)


def blocked_fraction(i: int, n: int, traffic: TrafficModel) -> Fraction:
    """Traffic share lost when one order-i polynomial is broken: p_i / 2^(n-i)."""
    if not 1 <= i <= n:
        raise ParamDomain(f"order {i} outside [1, {n}]")
    if traffic.n != n:
        raise ParamDomain(f"traffic model has n={traffic.n}, expected {n}")
    return traffic.p(i) / 2 ** (n - i)


def highest_order_blocked(n: int, traffic: TrafficModel) -> dict[str, Fraction]:
    """The two figures quoted for a top-order break: half of p_n, and p_n
    under the unnormalized weights."""
    return {"half_p_n": traffic.p(n) / 2, "raw_p_n": Fraction(1, 2 ** (n - 1))}


def _need(params: dict, *names):
    missing = [k for k in names if k not in params]
    if missing:
        raise ParamDomain(f"missing parameter(s): {', '.join(missing)}")
    return [params[k] for k in names]


EXACT_POOL_LIMIT = 1000


def _pool_connectivity(pool: int, ring: int) -> float:
    """1 - ((P-k)!)^2 / ((P-2k)! P!), i.e. the chance two random k-subsets of
    a P-pool intersect. Exact for small pools, a log-space product beyond."""
    if ring < 0 or pool < 2 * ring:
        raise ParamDomain(f"need pool >= 2 * ring (pool={pool}, ring={ring})")
    if pool <= EXACT_POOL_LIMIT:
        return float(1 - Fraction(math.comb(pool - ring, ring), math.comb(pool, ring)))
    # C(P-k, k) / C(P, k) = prod_{i<k} (1 - k / (P - i))
    log_miss = math.fsum(math.log1p(-ring / (pool - i)) for i in range(ring))
    return -math.expm1(log_miss)


def scheme_connectivity(scheme: str, **params) -> float:
    """Direct-key connectivity of a scheme from its closed form."""
    scheme = scheme.lower()
    if scheme == "hgbs":
        return 1.0
    if scheme in ("gbs", "gbs3d", "plat"):
        (N,) = _need(params, "N")
        if N <= 1:
            raise ParamDomain("N must exceed 1")
        if scheme == "gbs":
            return 2 / (math.sqrt(N) - 1)
        if scheme == "gbs3d":
            c = N ** (1 / 3)
            return 3 / (c * c + c + 1)
        return 3 / N ** (1 / 3)
    if scheme == "eg":
        P, k = _need(params, "P", "k")
        return _pool_connectivity(P, k)
    if scheme == "ddhv":
        omega, tau = _need(params, "omega", "tau")
        return _pool_connectivity(omega, tau)
    if scheme == "cps":
        m, N = _need(params, "m", "N")
        if not 0 < m <= N:
            raise ParamDomain("need 0 < m <= N")
        return m / N
    raise ParamDomain(f"scheme {scheme!r} not in {SCHEMES}")
