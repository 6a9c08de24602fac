"""Hierarchical grid of basic zones and structured node identifiers.

Basic zones are the leaves of a complete binary tree of height n-1. A node
is addressed by its leaf index ``path`` (bits read root to leaf) and a
1-based ``local`` index inside the zone. The encoded identifier is::

    0 | path (n-1 bits) | local-1 (ceil(lg m) bits)

i.e. n + ceil(lg m) bits in total, the leading bit being a zero pad.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass

from .errors import GridMismatch, IdWidthExceedsField, OrderOutOfRange, OutOfRange, ParamDomain

MAX_ID_BITS = 60


def ceil_lg(x: int) -> int:
    return (x - 1).bit_length()


@dataclass(frozen=True, order=True)
class GridParams:
    n: int
    k: int

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ParamDomain(f"need n >= 1 and k >= 1, got n={self.n}, k={self.k}")

    @property
    def m(self) -> int:
        return (2 * self.k) ** 2

    @property
    def zones(self) -> int:
        return 2 ** (self.n - 1)

    @property
    def N(self) -> int:
        return self.zones * self.m

    @property
    def local_bits(self) -> int:
        return ceil_lg(self.m)

    @property
    def id_bits(self) -> int:
        return self.n + self.local_bits

    def grids_at(self, order: int) -> int:
        """Number of grids of the given order, 2^(n-order)."""
        check_order(self, order)
        return 2 ** (self.n - order)

    def nodes(self) -> Iterator[NodeId]:
        """All nodes in (path, local) order, which is also encoded-ID order."""
        for path in range(self.zones):
            for local in range(1, self.m + 1):
                yield NodeId(path, local, self)


@dataclass(frozen=True, order=True)
class NodeId:
    path: int
    local: int
    grid: GridParams

    def __post_init__(self):
        if not 0 <= self.path < self.grid.zones:
            raise OutOfRange(f"path {self.path} outside [0, {self.grid.zones})")
        if not 1 <= self.local <= self.grid.m:
            raise OutOfRange(f"local {self.local} outside [1, {self.grid.m}]")

    @property
    def value(self) -> int:
        return encode_id(self)

    def bits(self) -> str:
        return format(self.value, f"0{self.grid.id_bits}b")


def make_grid(n: int, k: int) -> GridParams:
    grid = GridParams(n, k)
    if grid.id_bits > MAX_ID_BITS:
        raise IdWidthExceedsField(f"IDs need {grid.id_bits} bits, limit is {MAX_ID_BITS}")
    return grid


def encode_id(node: NodeId) -> int:
    return (node.path << node.grid.local_bits) | (node.local - 1)


def decode_id(value: int, grid: GridParams) -> NodeId:
    if not 0 <= value < 1 << grid.id_bits:
        raise OutOfRange(f"{value} does not fit in {grid.id_bits} bits")
    path = value >> grid.local_bits
    low = value & ((1 << grid.local_bits) - 1)
    if path >= grid.zones:
        raise OutOfRange(f"pad bit set in {value}")
    if low >= grid.m:
        raise OutOfRange(f"local code {low} is not assigned (m={grid.m})")
    return NodeId(path, low + 1, grid)


def check_order(grid: GridParams, order: int):
    if not 1 <= order <= grid.n:
        raise OrderOutOfRange(f"order {order} outside [1, {grid.n}]")


def grid_index(node: NodeId, order: int) -> int:
    """Index of the order-``order`` grid containing ``node``."""
    check_order(node.grid, order)
    return node.path >> (order - 1)


def common_order(a: NodeId, b: NodeId) -> int:
    """Smallest order whose grid holds both nodes (1 = same basic zone)."""
    if a.grid != b.grid:
        raise GridMismatch("nodes belong to different grids")
    return (a.path ^ b.path).bit_length() + 1


def order_pair_counts(grid: GridParams) -> dict[int, int]:
    """Number of unordered node pairs whose common order is o, for each o."""
    m = grid.m
    counts = {1: grid.zones * m * (m - 1) // 2}
    for o in range(2, grid.n + 1):
        half = 2 ** (o - 2) * m
        counts[o] = grid.grids_at(o) * half * half
    return counts
