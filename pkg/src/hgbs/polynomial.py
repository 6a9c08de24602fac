"""Symmetric bivariate polynomials, node shares and share-based recovery."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from .errors import (
    AsymmetricResult,
    DuplicateOwner,
    InsufficientShares,
    ModulusMismatch,
    ParamDomain,
)
from .field import PrimeField, UniPoly, _as_value, horner_eval, lagrange_basis


@dataclass(frozen=True)
class SymBivarPoly:
    """f(x, y) = sum a_ij x^i y^j with a_ij = a_ji.

    ``coeffs`` is the full (t+1) x (t+1) matrix as nested tuples; the
    constructor rejects asymmetric input.
    """

    coeffs: tuple[tuple[int, ...], ...]
    field: PrimeField

    def __post_init__(self):
        size = len(self.coeffs)
        if size == 0 or any(len(row) != size for row in self.coeffs):
            raise ParamDomain("coefficient matrix must be square and non-empty")
        for i in range(size):
            for j in range(i + 1, size):
                if self.coeffs[i][j] != self.coeffs[j][i]:
                    raise AsymmetricResult(f"a[{i}][{j}] != a[{j}][{i}]")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, i: int, j: int) -> int:
        return self.coeffs[i][j]

    @classmethod
    def from_upper(cls, upper: Sequence[int], t: int, f: PrimeField) -> SymBivarPoly:
        """Build from the row-major upper triangle (i <= j)."""
        m = [[0] * (t + 1) for _ in range(t + 1)]
        it = iter(upper)
        for i in range(t + 1):
            for j in range(i, t + 1):
                m[i][j] = m[j][i] = next(it) % f.q
        return cls(tuple(tuple(r) for r in m), f)


@dataclass(frozen=True)
class PolyShare:
    """g(y) = f(owner, y), the univariate share a node stores."""

    owner: int
    share: UniPoly

    @property
    def degree(self) -> int:
        return self.share.degree


def gen_sym_bivar(t: int, f: PrimeField, rng) -> SymBivarPoly:
    """Random symmetric polynomial of degree ``t``.

    Upper-triangle coefficients are drawn in row-major order with
    ``rng.randrange(q)``, so a seeded ``random.Random`` fixes the result.
    """
    if t < 0:
        raise ParamDomain("degree must be non-negative")
    n_upper = (t + 1) * (t + 2) // 2
    return SymBivarPoly.from_upper([rng.randrange(f.q) for _ in range(n_upper)], t, f)


def _check_field(a: PrimeField, b: PrimeField):
    if a != b:
        raise ModulusMismatch(f"q={a.q} vs q={b.q}")


def _share_coeffs(f: SymBivarPoly, x: int) -> tuple[int, ...]:
    q = f.field.q
    size = len(f.coeffs)
    out = [0] * size
    xp = 1
    for row in f.coeffs:
        if xp:
            for j in range(size):
                out[j] += row[j] * xp
        xp = xp * x % q
    return tuple(c % q for c in out)


def derive_share(f: SymBivarPoly, owner) -> PolyShare:
    x = _as_value(owner, f.field)
    return PolyShare(x, UniPoly(_share_coeffs(f, x), f.field))


def eval_bivar(f: SymBivarPoly, x, y) -> int:
    """Evaluate the double sum directly, x^i y^j term by term."""
    q = f.field.q
    x = _as_value(x, f.field)
    y = _as_value(y, f.field)
    size = len(f.coeffs)
    ypow = [1] * size
    for j in range(1, size):
        ypow[j] = ypow[j - 1] * y % q
    total = 0
    xp = 1
    for row in f.coeffs:
        total += xp * sum(a * b for a, b in zip(row, ypow))
        xp = xp * x % q
    return total % q


def eval_share(s: PolyShare, other_id) -> int:
    """Pairwise key g^owner(other_id)."""
    return horner_eval(s.share, other_id)


def recover_from_shares(shares: Sequence[PolyShare], t: int) -> SymBivarPoly:
    """Rebuild f from at least t+1 shares of degree t.

    Column j of f, viewed as a polynomial in x, takes the value
    ``share.coeffs[j]`` at x = owner; interpolating it over t+1 owners gives
    a_0j .. a_tj. Extra shares beyond t+1 are checked for consistency.
    """
    if len(shares) < t + 1:
        raise InsufficientShares(f"{len(shares)} shares, need {t + 1}")
    owners = [s.owner for s in shares]
    if len(set(owners)) != len(owners):
        raise DuplicateOwner("shares must come from distinct owners")
    fld = shares[0].share.field
    for s in shares:
        _check_field(fld, s.share.field)
        if s.degree != t:
            raise ParamDomain(f"share of degree {s.degree}, expected {t}")
    q = fld.q
    used = shares[: t + 1]
    basis = lagrange_basis([s.owner for s in used], fld)
    cols = []
    for j in range(t + 1):
        col = [0] * (t + 1)
        for s, b in zip(used, basis):
            v = s.share.coeffs[j]
            for i, c in enumerate(b):
                col[i] += v * c
        cols.append([c % q for c in col])
    matrix = [[cols[j][i] for j in range(t + 1)] for i in range(t + 1)]
    try:
        poly = SymBivarPoly(tuple(tuple(r) for r in matrix), fld)
    except AsymmetricResult as exc:
        raise AsymmetricResult(f"shares do not come from one symmetric polynomial ({exc})") from None
    for s in shares[t + 1 :]:
        if _share_coeffs(poly, s.owner) != s.share.coeffs:
            raise AsymmetricResult(f"share of owner {s.owner} is inconsistent with the others")
    return poly
