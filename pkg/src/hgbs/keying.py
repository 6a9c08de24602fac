"""Keying material assignment, pairwise key establishment and truncated rings.

Every grid of every order owns one symmetric bivariate polynomial; a node
receives the share of each polynomial on its root-to-leaf path. Two nodes
use the polynomial of the smallest grid that contains both of them.

Polynomial (order, index) is generated from a ``random.Random`` seeded with::

    int.from_bytes(blake2b(b"hgbs/poly/<master_seed>/<order>/<index>",
                           digest_size=16).digest(), "big")

in generation order order = 1..n, index = 0..2^(n-order)-1. This mixing
rule is part of the deployment file contract and must not change.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, field as dc_field, replace
from fractions import Fraction
from typing import NamedTuple

from .errors import (
    FormatError,
    IdWidthExceedsField,
    NoRelayExists,
    OrderTruncated,
    ParamDomain,
    SameNode,
)
from .field import PrimeField, UniPoly
from .polynomial import PolyShare, SymBivarPoly, derive_share, eval_share, gen_sym_bivar
from .topology import GridParams, NodeId, check_order, common_order, decode_id, encode_id, grid_index

FORMAT_VERSION = 1
POLICIES = ("flat", "doubling")


@dataclass(frozen=True)
class DegreePolicy:
    """Degree of the polynomials at each order.

    ``flat`` uses t0 everywhere; ``doubling`` uses 2^(o-1) * t0 at order o.
    """

    kind: str
    t0: int
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in POLICIES:
            raise ParamDomain(f"policy {self.kind!r} not in {POLICIES}")
        if self.t0 < 1:
            raise ParamDomain("t0 must be at least 1")

    @classmethod
    def from_alpha(cls, kind: str, alpha: float, m: int) -> DegreePolicy:
        if not 0 < alpha <= 1:
            raise ParamDomain(f"alpha must be in (0, 1], got {alpha}")
        return cls(kind, base_degree(alpha, m), alpha)

    def degree(self, order: int) -> int:
        if self.kind == "flat":
            return self.t0
        return 2 ** (order - 1) * self.t0


def base_degree(alpha: float, m: int) -> int:
    """t0 = max(1, floor(alpha * m)), floored on the decimal value of alpha."""
    return max(1, math.floor(Fraction(str(alpha)) * m))


@dataclass(frozen=True)
class KeyRing:
    owner: NodeId
    shares: dict[int, PolyShare]
    truncation: int

    def share(self, order: int) -> PolyShare:
        try:
            return self.shares[order]
        except KeyError:
            raise OrderTruncated(
                f"node {self.owner.value} keeps orders 1..{self.truncation}, order {order} requested"
            ) from None


@dataclass(frozen=True)
class Deployment:
    grid: GridParams
    policy: DegreePolicy
    field: PrimeField
    master_seed: int
    rings: dict[int, KeyRing]
    # Trusted-authority copy, kept for oracles and tests only.
    polynomials: dict[int, list[SymBivarPoly]] | None = dc_field(default=None, repr=False)

    @property
    def truncation(self) -> int:
        return min(r.truncation for r in self.rings.values())

    def node(self, ident) -> NodeId:
        if isinstance(ident, NodeId):
            return ident
        return decode_id(ident, self.grid)

    def ring(self, ident) -> KeyRing:
        return self.rings[self.node(ident).value]

    def polynomial(self, order: int, index: int) -> SymBivarPoly:
        if self.polynomials is None:
            raise ParamDomain("deployment carries no authority polynomials")
        return self.polynomials[order][index]

    def to_json(self) -> str:
        return dump_deployment(self)


def poly_seed(master_seed: int, order: int, index: int) -> int:
    tag = f"hgbs/poly/{master_seed}/{order}/{index}".encode()
    return int.from_bytes(hashlib.blake2b(tag, digest_size=16).digest(), "big")


def assign_keying_material(
    grid: GridParams, policy: DegreePolicy, f: PrimeField, master_seed: int
) -> Deployment:
    if f.q <= 1 << grid.id_bits:
        raise IdWidthExceedsField(f"modulus {f.q} does not exceed 2^{grid.id_bits}")
    polys: dict[int, list[SymBivarPoly]] = {}
    for order in range(1, grid.n + 1):
        t = policy.degree(order)
        polys[order] = [
            gen_sym_bivar(t, f, random.Random(poly_seed(master_seed, order, g)))
            for g in range(grid.grids_at(order))
        ]
    rings = {}
    for node in grid.nodes():
        x = encode_id(node)
        shares = {o: derive_share(polys[o][grid_index(node, o)], x) for o in range(1, grid.n + 1)}
        rings[x] = KeyRing(node, shares, grid.n)
    return Deployment(grid, policy, f, master_seed, rings, polys)


def establish_key(dep: Deployment, i, j) -> int:
    """Key node ``i`` computes for node ``j``; equals the one j computes for i."""
    a, b = dep.node(i), dep.node(j)
    if a == b:
        raise SameNode(f"node {a.value} cannot key with itself")
    o = common_order(a, b)
    ring_a, ring_b = dep.ring(a), dep.ring(b)
    if o > ring_b.truncation:
        raise OrderTruncated(f"node {b.value} keeps orders 1..{ring_b.truncation}, pair needs order {o}")
    return eval_share(ring_a.share(o), b.value)


def truncate_rings(dep: Deployment, d: int, nodes=None) -> Deployment:
    """Drop shares above order ``d`` from the given nodes (all by default)."""
    check_order(dep.grid, d)
    targets = None if nodes is None else {dep.node(x).value for x in nodes}
    rings = {}
    for x, ring in dep.rings.items():
        if targets is None or x in targets:
            keep = min(d, ring.truncation)
            ring = KeyRing(ring.owner, {o: s for o, s in ring.shares.items() if o <= keep}, keep)
        rings[x] = ring
    return replace(dep, rings=rings)


def _direct(dep: Deployment, a: NodeId, b: NodeId) -> bool:
    return common_order(a, b) <= min(dep.ring(a).truncation, dep.ring(b).truncation)


def relay_candidates(dep: Deployment, i, j) -> list[NodeId]:
    a, b = dep.node(i), dep.node(j)
    return [
        ring.owner
        for ring in dep.rings.values()
        if ring.owner not in (a, b) and _direct(dep, a, ring.owner) and _direct(dep, ring.owner, b)
    ]


class PathKey(NamedTuple):
    key: int
    relay: NodeId
    audit: tuple[str, ...]


def establish_path_key(dep: Deployment, i, j, rng) -> PathKey:
    """Key two nodes through one relay that shares a retained polynomial with each.

    The relay draws a fresh field element and sends it to both ends under
    the direct keys k_iw and k_wj. Nothing is encrypted here; the audit
    trail records which keys would protect the transport.

    When every ring is truncated to the same order d, no relay can exist:
    common orders satisfy co(i, j) <= max(co(i, w), co(w, j)). A relay is
    only found when some rings keep more orders than others.
    """
    a, b = dep.node(i), dep.node(j)
    if a == b:
        raise SameNode(f"node {a.value} cannot key with itself")
    if _direct(dep, a, b):
        raise ParamDomain(f"nodes {a.value} and {b.value} can establish a key directly")
    candidates = relay_candidates(dep, a, b)
    if not candidates:
        raise NoRelayExists(f"no node shares a retained polynomial with both {a.value} and {b.value}")
    w = rng.choice(candidates)
    key = dep.field.random(rng)
    o_aw, o_wb = common_order(a, w), common_order(w, b)
    audit = (
        f"relay {w.value} drew a fresh key",
        f"sent to {a.value} under k_iw (order {o_aw})",
        f"sent to {b.value} under k_wj (order {o_wb})",
    )
    return PathKey(key, w, audit)


def dump_deployment(dep: Deployment, include_authority: bool = True) -> str:
    """Serialize to JSON text. Field elements and big integers are decimal strings."""
    doc = {
        "format_version": FORMAT_VERSION,
        "n": dep.grid.n,
        "k": dep.grid.k,
        "alpha": dep.policy.alpha,
        "policy": dep.policy.kind,
        "t0": dep.policy.t0,
        "modulus": str(dep.field.q),
        "master_seed": str(dep.master_seed),
        "truncation": dep.truncation,
        "rings": [
            {
                "id": str(x),
                "truncation": ring.truncation,
                "shares": [
                    {"order": o, "coeffs": [str(c) for c in s.share.coeffs]}
                    for o, s in sorted(ring.shares.items())
                ],
            }
            for x, ring in sorted(dep.rings.items())
        ],
    }
    if include_authority and dep.polynomials is not None:
        doc["authority_polynomials"] = [
            {
                "order": o,
                "index": g,
                "degree": p.degree,
                "upper": [str(p.coeffs[r][c]) for r in range(p.degree + 1) for c in range(r, p.degree + 1)],
            }
            for o, polys in sorted(dep.polynomials.items())
            for g, p in enumerate(polys)
        ]
    return json.dumps(doc, separators=(",", ":")) + "\n"


def load_deployment(text: str) -> Deployment:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not a JSON document: {exc}") from None
    if doc.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {doc.get('format_version')!r}")
    try:
        grid = GridParams(doc["n"], doc["k"])
        policy = DegreePolicy(doc["policy"], doc["t0"], doc["alpha"])
        f = PrimeField(int(doc["modulus"]))
        rings = {}
        for entry in doc["rings"]:
            node = decode_id(int(entry["id"]), grid)
            shares = {}
            for s in entry["shares"]:
                o = s["order"]
                coeffs = tuple(int(c) for c in s["coeffs"])
                if len(coeffs) != policy.degree(o) + 1:
                    raise FormatError(f"share of order {o} has {len(coeffs)} coefficients")
                shares[o] = PolyShare(node.value, UniPoly(coeffs, f))
            rings[node.value] = KeyRing(node, shares, entry["truncation"])
        if len(rings) != grid.N:
            raise FormatError(f"{len(rings)} rings for {grid.N} nodes")
        polys = None
        if "authority_polynomials" in doc:
            polys = {o: [None] * grid.grids_at(o) for o in range(1, grid.n + 1)}
            for p in doc["authority_polynomials"]:
                polys[p["order"]][p["index"]] = SymBivarPoly.from_upper(
                    [int(c) for c in p["upper"]], p["degree"], f
                )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed deployment document: {exc!r}") from None
    return Deployment(grid, policy, f, int(doc["master_seed"]), rings, polys)
