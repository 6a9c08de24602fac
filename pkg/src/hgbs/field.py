"""Prime-field arithmetic, univariate polynomials and Lagrange interpolation.

Values are plain Python ints in ``[0, q)``; a :class:`PrimeField` carries the
modulus and does the reductions. :class:`FieldElement` wraps an int with its
field for callers that want operator syntax and modulus checking.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from contextlib import contextmanager
from dataclasses import dataclass, field as dc_field

from .errors import DivisionByZero, DuplicateAbscissa, ModulusMismatch, ParamDomain

MERSENNE_61 = (1 << 61) - 1
MAX_MODULUS_BITS = 63

# Deterministic Miller-Rabin witnesses, exact for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeField:
    """GF(q) for a prime q of at most 63 bits."""

    q: int = MERSENNE_61

    def __post_init__(self):
        if self.q.bit_length() > MAX_MODULUS_BITS:
            raise ParamDomain(f"modulus has {self.q.bit_length()} bits, limit is {MAX_MODULUS_BITS}")
        if not is_prime(self.q):
            raise ParamDomain(f"modulus {self.q} is not prime")

    @property
    def bits(self) -> int:
        return self.q.bit_length()

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def neg(self, a: int) -> int:
        return -a % self.q

    def mul(self, a: int, b: int) -> int:
        return a * b % self.q

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise DivisionByZero("zero has no inverse")
        return pow(a, self.q - 2, self.q)

    def div(self, a: int, b: int) -> int:
        return a * self.inv(b) % self.q

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(value % self.q, self)

    def random(self, rng) -> int:
        """Uniform element of [0, q) drawn from a ``random.Random``-like rng."""
        return rng.randrange(self.q)


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: PrimeField = dc_field(repr=False)

    def __post_init__(self):
        if not 0 <= self.value < self.field.q:
            raise ParamDomain(f"{self.value} is not reduced modulo {self.field.q}")

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ModulusMismatch(f"q={self.field.q} vs q={other.field.q}")
            return other.value
        if isinstance(other, int):
            return other % self.field.q
        return NotImplemented

    def __add__(self, other):
        return FieldElement(self.field.add(self.value, self._other(other)), self.field)

    def __sub__(self, other):
        return FieldElement(self.field.sub(self.value, self._other(other)), self.field)

    def __mul__(self, other):
        return FieldElement(self.field.mul(self.value, self._other(other)), self.field)

    def __truediv__(self, other):
        return FieldElement(self.field.div(self.value, self._other(other)), self.field)

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.field.neg(self.value), self.field)

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value


def field_arith(a: FieldElement, b: FieldElement, kind: str) -> FieldElement:
    """Apply ``kind`` in {"add", "sub", "mul", "inv-mul"}; inv-mul is a / b."""
    if a.field != b.field:
        raise ModulusMismatch(f"q={a.field.q} vs q={b.field.q}")
    ops = {"add": a.field.add, "sub": a.field.sub, "mul": a.field.mul, "inv-mul": a.field.div}
    try:
        op = ops[kind]
    except KeyError:
        raise ParamDomain(f"unknown arithmetic kind {kind!r}; expected one of {sorted(ops)}") from None
    return FieldElement(op(a.value, b.value), a.field)


class OpCounter:
    def __init__(self):
        self.mults = 0
        self.adds = 0


# Instrumentation hook; None means counting is disabled.
_counter: OpCounter | None = None


@contextmanager
def count_ops():
    """Count field multiplications/additions done by :func:`horner_eval`."""
    global _counter
    saved, _counter = _counter, OpCounter()
    try:
        yield _counter
    finally:
        _counter = saved


@dataclass(frozen=True)
class UniPoly:
    """Polynomial in y over ``field``; ``coeffs[i]`` multiplies y**i."""

    coeffs: tuple[int, ...]
    field: PrimeField = dc_field(repr=False)

    def __post_init__(self):
        if not self.coeffs:
            raise ParamDomain("a polynomial needs at least one coefficient")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, y) -> int:
        return horner_eval(self, y)


def _as_value(x, f: PrimeField) -> int:
    if isinstance(x, FieldElement):
        if x.field != f:
            raise ModulusMismatch(f"q={f.q} vs q={x.field.q}")
        return x.value
    return x % f.q


def horner_eval(p: UniPoly, y) -> int:
    """Evaluate ``p`` at ``y`` with exactly ``p.degree`` mults and adds."""
    q = p.field.q
    y = _as_value(y, p.field)
    coeffs = p.coeffs
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = (acc * y + c) % q
    if _counter is not None:
        _counter.mults += p.degree
        _counter.adds += p.degree
    return acc


def poly_from_roots(roots: Iterable[int], f: PrimeField) -> list[int]:
    """Coefficients (low to high) of prod (y - r)."""
    q = f.q
    out = [1]
    for r in roots:
        nxt = [0] * (len(out) + 1)
        for i, c in enumerate(out):
            nxt[i] = (nxt[i] - r * c) % q
            nxt[i + 1] = (nxt[i + 1] + c) % q
        out = nxt
    return out


def lagrange_basis(xs: Sequence[int], f: PrimeField) -> list[list[int]]:
    """Basis polynomials L_i with L_i(xs[j]) = [i == j]."""
    q = f.q
    xs = [_as_value(x, f) for x in xs]
    if len(set(xs)) != len(xs):
        raise DuplicateAbscissa("interpolation abscissas must be distinct")
    master = poly_from_roots(xs, f)
    k = len(xs)
    basis = []
    for x in xs:
        # synthetic division of master by (y - x)
        num = [0] * k
        num[k - 1] = master[k]
        for j in range(k - 1, 0, -1):
            num[j - 1] = (master[j] + x * num[j]) % q
        scale = f.inv(_plain_eval(num, x, q))
        basis.append([c * scale % q for c in num])
    return basis


def _plain_eval(coeffs: Sequence[int], y: int, q: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * y + c) % q
    return acc


def lagrange_interpolate(points: Sequence[tuple[int, int]], f: PrimeField) -> UniPoly:
    """Unique polynomial of degree <= len(points) - 1 through ``points``."""
    if not points:
        raise ParamDomain("need at least one point")
    q = f.q
    basis = lagrange_basis([x for x, _ in points], f)
    coeffs = [0] * len(points)
    for (_, v), b in zip(points, basis):
        v = _as_value(v, f)
        for j, c in enumerate(b):
            coeffs[j] = (coeffs[j] + v * c) % q
    return UniPoly(tuple(coeffs), f)
