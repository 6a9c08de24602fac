"""Monte Carlo and exhaustive checks of the closed forms.

Compromise trials are drawn in batches from one ``numpy`` generator seeded
with the caller's seed; counters are integers and the estimate is a single
division at the end, so results depend only on (deployment, params, seed).
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import analysis
from .errors import ParamDomain, ZoneOutOfRange
from .keying import Deployment, establish_key
from .polynomial import eval_bivar, eval_share
from .topology import GridParams, common_order, grid_index, order_pair_counts

BATCH = 8192

REPORT_COLUMNS = (
    "sim_kind", "n", "k", "alpha", "policy", "param", "trials", "seed",
    "estimate", "closed_form", "abs_error",
)


@dataclass
class SimReport:
    sim_kind: str
    grid: GridParams
    param: str
    trials: int
    seed: int
    estimate: float
    closed_form: float | None = None
    alpha: float | None = None
    policy: str | None = None
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def abs_error(self) -> float | None:
        if self.closed_form is None:
            return None
        return abs(self.estimate - self.closed_form)

    def row(self) -> dict:
        return {
            "sim_kind": self.sim_kind,
            "n": self.grid.n,
            "k": self.grid.k,
            "alpha": self.alpha,
            "policy": self.policy,
            "param": self.param,
            "trials": self.trials,
            "seed": self.seed,
            "estimate": self.estimate,
            "closed_form": self.closed_form,
            "abs_error": self.abs_error,
        }


def _dep_fields(dep: Deployment) -> dict:
    return {"alpha": dep.policy.alpha, "policy": dep.policy.kind}


def mc_same_zone(grid: GridParams, z: int, trials: int, seed: int) -> SimReport:
    """Estimate P[two distinct random nodes both lie in order-z grid 0]."""
    if trials < 1:
        raise ParamDomain("trials must be at least 1")
    pz, _ = analysis.connectivity_pz(z, grid.n, grid.m)
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    limit = 2 ** (z - 1) * grid.m  # nodes are numbered zone by zone
    hits = 0
    done = 0
    while done < trials:
        size = min(BATCH * 16, trials - done)
        a = rng.integers(0, grid.N, size)
        b = rng.integers(0, grid.N - 1, size) if grid.N > 1 else np.zeros(size, dtype=np.int64)
        b = b + (b >= a)
        hits += int(np.count_nonzero((a < limit) & (b < limit)))
        done += size
    return SimReport(
        "same-zone", grid, f"z={z}", trials, seed, hits / trials, float(pz),
        wall_time=time.perf_counter() - start,
    )


@dataclass(frozen=True)
class CompromiseState:
    """Revealed share counts after the given nodes are captured.

    A captured node discloses its whole ring. Polynomial (order, index) is
    broken once degree+1 distinct shares of it are known.
    """

    compromised: frozenset[int]
    revealed: dict[tuple[int, int], int]
    broken: frozenset[tuple[int, int]]

    @classmethod
    def from_nodes(cls, dep: Deployment, nodes) -> CompromiseState:
        captured = frozenset(dep.node(x).value for x in nodes)
        revealed: dict[tuple[int, int], int] = {}
        for x in captured:
            ring = dep.rings[x]
            for o in ring.shares:
                key = (o, grid_index(ring.owner, o))
                revealed[key] = revealed.get(key, 0) + 1
        broken = frozenset(p for p, c in revealed.items() if c >= dep.policy.degree(p[0]) + 1)
        return cls(captured, revealed, broken)


def affected_links(dep: Deployment, state: CompromiseState) -> tuple[int, int]:
    """(links among intact nodes keyed by a broken polynomial, all such links)."""
    intact = [r.owner for x, r in sorted(dep.rings.items()) if x not in state.compromised]
    affected = 0
    for a, b in itertools.combinations(intact, 2):
        o = common_order(a, b)
        if (o, grid_index(a, o)) in state.broken:
            affected += 1
    return affected, math.comb(len(intact), 2)


class _PolyLayout:
    """Dense numbering of polynomials and node membership for batch trials."""

    def __init__(self, dep: Deployment):
        grid = dep.grid
        self.polys = [(o, g) for o in range(1, grid.n + 1) for g in range(grid.grids_at(o))]
        self.index = {p: i for i, p in enumerate(self.polys)}
        self.nodes = [r.owner for _, r in sorted(dep.rings.items())]
        self.member = np.zeros((len(self.nodes), len(self.polys)), dtype=np.int32)
        for v, node in enumerate(self.nodes):
            for o in range(1, grid.n + 1):
                self.member[v, self.index[(o, grid_index(node, o))]] = 1
        self.threshold = np.array([dep.policy.degree(o) + 1 for o, _ in self.polys])
        self.children = [
            (i, self.index[(o - 1, 2 * g)], self.index[(o - 1, 2 * g + 1)])
            for i, (o, g) in enumerate(self.polys)
            if o > 1
        ]
        # polynomials a ring no longer holds cannot leak
        self.held = np.array(
            [[o in dep.rings[n.value].shares for (o, _) in self.polys] for n in self.nodes], dtype=np.int32
        )

    def outcomes(self, mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Broken flags (B, P) and affected intact-link counts (B,) for a
        boolean capture mask of shape (B, N)."""
        captured = mask.astype(np.int32)
        revealed = captured @ (self.member * self.held)
        broken = revealed >= self.threshold
        intact = (1 - captured) @ self.member
        pairs = intact.astype(np.int64) * (intact - 1) // 2
        own = pairs.copy()
        for i, c1, c2 in self.children:
            own[:, i] -= pairs[:, c1] + pairs[:, c2]
        affected = (own * broken).sum(axis=1)
        return broken, affected


def _capture_masks(rng: np.random.Generator, pool: np.ndarray, count: int, size: int, N: int) -> np.ndarray:
    picks = rng.permuted(np.tile(pool, (size, 1)), axis=1)[:, :count]
    mask = np.zeros((size, N), dtype=bool)
    np.put_along_axis(mask, picks, True, axis=1)
    return mask


def _run_capture(dep, layout, pool, count, trials, seed, poly_index):
    rng = np.random.default_rng(seed)
    N = dep.grid.N
    broken_hits = 0
    affected_total = 0
    done = 0
    while done < trials:
        size = min(BATCH, trials - done)
        mask = _capture_masks(rng, pool, count, size, N)
        broken, affected = layout.outcomes(mask)
        broken_hits += int(np.count_nonzero(broken[:, poly_index]))
        affected_total += int(affected.sum())
        done += size
    links = math.comb(N - count, 2)
    link_fraction = affected_total / (trials * links) if links else 0.0
    return broken_hits, affected_total, link_fraction


def mc_compromise_random(dep: Deployment, N_c: int, trials: int, seed: int) -> list[SimReport]:
    """Capture N_c distinct uniformly chosen nodes per trial.

    Returns two reports: the probability that basic-zone polynomial (1, 0)
    is broken, and the mean fraction of intact-node links whose polynomial
    is broken. The zone report's closed form is the binomial tail with
    threshold t0+1. The same tail at threshold t0 and the exact
    hypergeometric value (captures are distinct nodes) go in ``extra``.
    """
    grid = dep.grid
    if not 0 <= N_c <= grid.N:
        raise ParamDomain(f"N_c={N_c} outside [0, {grid.N}]")
    if trials < 1:
        raise ParamDomain("trials must be at least 1")
    start = time.perf_counter()
    layout = _PolyLayout(dep)
    hits, affected, link_fraction = _run_capture(
        dep, layout, np.arange(grid.N), N_c, trials, seed, layout.index[(1, 0)]
    )
    elapsed = time.perf_counter() - start
    t_zone = dep.policy.degree(1)
    common = dict(grid=grid, param=f"N_c={N_c}", trials=trials, seed=seed, wall_time=elapsed, **_dep_fields(dep))
    zone = SimReport(
        "compromise-random-zone",
        estimate=hits / trials,
        closed_form=analysis.resiliency_pr(N_c, t_zone, grid.m, grid.N, threshold=t_zone + 1),
        extra={
            "literal_t0": analysis.resiliency_pr(N_c, t_zone, grid.m, grid.N),
            "threshold_corrected": analysis.resiliency_pr(N_c, t_zone, grid.m, grid.N, threshold=t_zone + 1),
            "hypergeometric": float(analysis.zone_break_exact(N_c, t_zone + 1, grid.m, grid.N)),
        },
        **common,
    )
    links = SimReport(
        "compromise-random-links", estimate=link_fraction, extra={"affected_links": affected}, **common
    )
    return [zone, links]


def mc_compromise_selective(dep: Deployment, target_zone: int, budget: int, trials: int, seed: int) -> SimReport:
    """Capture ``budget`` random nodes inside one basic zone per trial."""
    grid = dep.grid
    if not 0 <= target_zone < grid.zones:
        raise ZoneOutOfRange(f"zone {target_zone} outside [0, {grid.zones})")
    if not 0 <= budget <= grid.m:
        raise ParamDomain(f"budget {budget} outside [0, {grid.m}]")
    if trials < 1:
        raise ParamDomain("trials must be at least 1")
    start = time.perf_counter()
    layout = _PolyLayout(dep)
    pool = np.array([v for v, node in enumerate(layout.nodes) if node.path == target_zone])
    hits, affected, link_fraction = _run_capture(
        dep, layout, pool, budget, trials, seed, layout.index[(1, target_zone)]
    )
    threshold = dep.policy.degree(1) + 1
    return SimReport(
        "compromise-selective", grid, f"zone={target_zone},budget={budget}", trials, seed,
        hits / trials, 1.0 if budget >= threshold else 0.0,
        wall_time=time.perf_counter() - start,
        extra={
            "min_break_budget": threshold,
            "expected_random_budget": float(analysis.expected_random_break_budget(threshold, grid.m, grid.N)),
            "link_fraction": link_fraction,
            "affected_links": affected,
        },
        **_dep_fields(dep),
    )


def _pairs_by_order(dep: Deployment):
    nodes = [r.owner for _, r in sorted(dep.rings.items())]
    for a, b in itertools.combinations(nodes, 2):
        yield a, b, common_order(a, b)


def mc_blocked_traffic(dep: Deployment, broken_order_i: int, traffic: analysis.TrafficModel) -> Fraction:
    """Exact traffic share carried by polynomial (i, 0), by enumerating pairs.

    Each pair at common order o carries p_o divided by the number of pairs
    at that order.
    """
    grid = dep.grid
    if not 1 <= broken_order_i <= grid.n:
        raise ParamDomain(f"order {broken_order_i} outside [1, {grid.n}]")
    per_order = dict.fromkeys(range(1, grid.n + 1), 0)
    blocked = dict.fromkeys(range(1, grid.n + 1), 0)
    for a, _, o in _pairs_by_order(dep):
        per_order[o] += 1
        if o == broken_order_i and grid_index(a, o) == 0:
            blocked[o] += 1
    return sum(
        (traffic.p(o) * Fraction(blocked[o], per_order[o]) for o in per_order if per_order[o]),
        Fraction(0),
    )


def reestablish_after_break(dep: Deployment, broken_order_i: int) -> tuple[int, int]:
    """Re-key the pairs of broken polynomial (i, 0) with their order i+1 shares.

    Returns (affected pairs, pairs whose two sides agree).
    """
    grid = dep.grid
    if not 1 <= broken_order_i < grid.n:
        raise ParamDomain(f"order {broken_order_i} has no parent order in n={grid.n}")
    up = broken_order_i + 1
    affected = agreed = 0
    for a, b, o in _pairs_by_order(dep):
        if o == broken_order_i and grid_index(a, o) == 0:
            affected += 1
            k_ab = eval_share(dep.ring(a).share(up), b.value)
            k_ba = eval_share(dep.ring(b).share(up), a.value)
            agreed += k_ab == k_ba
    return affected, agreed


@dataclass
class AgreementReport:
    pairs: int
    agreed: int
    oracle_checked: int
    oracle_matches: int
    histogram: dict[int, int]
    expected_histogram: dict[int, int]

    @property
    def rate(self) -> float:
        return self.agreed / self.pairs if self.pairs else 1.0


def agreement_sweep(dep: Deployment) -> AgreementReport:
    """Establish keys for every unordered pair in both directions; when the
    authority polynomials are present also compare with f(id_i, id_j)."""
    if dep.truncation < dep.grid.n:
        raise ParamDomain("agreement sweep needs an untruncated deployment")
    pairs = agreed = checked = matches = 0
    histogram = dict.fromkeys(range(1, dep.grid.n + 1), 0)
    for a, b, o in _pairs_by_order(dep):
        pairs += 1
        histogram[o] += 1
        k_ab = establish_key(dep, a, b)
        k_ba = establish_key(dep, b, a)
        agreed += k_ab == k_ba
        if dep.polynomials is not None:
            checked += 1
            matches += k_ab == eval_bivar(dep.polynomial(o, grid_index(a, o)), a.value, b.value)
    return AgreementReport(pairs, agreed, checked, matches, histogram, order_pair_counts(dep.grid))


def direct_connectivity(dep: Deployment, include_self: bool = False) -> Fraction:
    """Exhaustive share of node pairs that can key without a relay.

    With ``include_self`` the count runs over all ordered pairs (i, j)
    including i == j, which is the per-node reach 2^(d-n) of a ring truncated
    at order d; otherwise over distinct unordered pairs.
    """
    nodes = [r.owner for _, r in sorted(dep.rings.items())]

    def direct(a, b):
        return common_order(a, b) <= min(dep.ring(a).truncation, dep.ring(b).truncation)

    if include_self:
        hits = sum(direct(a, b) for a in nodes for b in nodes)
        return Fraction(hits, len(nodes) ** 2)
    hits = sum(direct(a, b) for a, b in itertools.combinations(nodes, 2))
    return Fraction(hits, math.comb(len(nodes), 2))
