"""Entire zerosumfree semirings used as kernel scalars.

Three instances ship: exact nonnegative rationals (``qnonneg``), Booleans
(``bool``) and naturals (``nat``).  A signed-integer instance exists only so
the axiom checker has something to fail on; every other module rejects it.

Kernels keep raw payloads (``Fraction``, ``bool``, ``int``) and a shared
:class:`Semiring`; :class:`SemiringValue` is the tagged form used at API
boundaries where instance mismatches must be caught.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable


class SemiringError(ValueError):
    pass


class InstanceMismatch(SemiringError):
    pass


class UnsupportedInstance(SemiringError):
    """Raised when an operation is not available for a semiring instance."""


class Semiring:
    tag: str = ""
    test_only = False

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def plus(self, a, b):
        raise NotImplementedError

    def times(self, a, b):
        raise NotImplementedError

    def coerce(self, x):
        """Validate a raw payload and return its canonical form."""
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    def format(self, a) -> str:
        return str(a)

    def is_zero(self, a) -> bool:
        return a == self.zero()

    def total(self, values: Iterable) -> Any:
        acc = self.zero()
        for v in values:
            acc = self.plus(acc, v)
        return acc

    def __call__(self, x) -> "SemiringValue":
        return SemiringValue(self, self.coerce(x))

    def __repr__(self):
        return f"<semiring {self.tag}>"

    def __eq__(self, other):
        return isinstance(other, Semiring) and other.tag == self.tag

    def __hash__(self):
        return hash(self.tag)

    def __reduce__(self):
        return (get_semiring, (self.tag,))


class QNonneg(Semiring):
    tag = "qnonneg"

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def plus(self, a, b):
        return a + b

    def times(self, a, b):
        return a * b

    def coerce(self, x):
        if isinstance(x, bool) or not isinstance(x, (int, Fraction, str)):
            raise SemiringError(f"not an exact rational: {x!r}")
        q = Fraction(x)
        if q < 0:
            raise SemiringError(f"negative weight {q} in qnonneg")
        return q

    def parse(self, text):
        try:
            return self.coerce(Fraction(text.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise SemiringError(f"bad rational {text!r}") from exc

    def format(self, a):
        return str(a)

    def divide(self, a, b):
        return a / b


class Bool(Semiring):
    tag = "bool"

    def zero(self):
        return False

    def one(self):
        return True

    def plus(self, a, b):
        return a or b

    def times(self, a, b):
        return a and b

    def coerce(self, x):
        if isinstance(x, bool):
            return x
        if x in (0, 1):
            return bool(x)
        raise SemiringError(f"not a Boolean: {x!r}")

    def parse(self, text):
        t = text.strip()
        if t in ("1", "⊤", "true", "T"):
            return True
        if t in ("0", "⊥", "false", "F"):
            return False
        raise SemiringError(f"bad Boolean {text!r}")

    def format(self, a):
        return "1" if a else "0"


class Nat(Semiring):
    tag = "nat"

    def zero(self):
        return 0

    def one(self):
        return 1

    def plus(self, a, b):
        return a + b

    def times(self, a, b):
        return a * b

    def coerce(self, x):
        if isinstance(x, bool) or not isinstance(x, int) or x < 0:
            raise SemiringError(f"not a natural number: {x!r}")
        return x

    def parse(self, text):
        t = text.strip()
        if not t.isdigit():
            raise SemiringError(f"bad natural {text!r}")
        return int(t)


class SignedInt(Semiring):
    """Integers with their usual ring structure.  Test-only: not zerosumfree."""

    tag = "signed"
    test_only = True

    def zero(self):
        return 0

    def one(self):
        return 1

    def plus(self, a, b):
        return a + b

    def times(self, a, b):
        return a * b

    def coerce(self, x):
        if isinstance(x, bool) or not isinstance(x, int):
            raise SemiringError(f"not an integer: {x!r}")
        return x

    def parse(self, text):
        return int(text)


QNONNEG = QNonneg()
BOOL = Bool()
NAT = Nat()
SIGNED = SignedInt()

SHIPPED = {s.tag: s for s in (QNONNEG, BOOL, NAT)}


def get_semiring(tag: str) -> Semiring:
    if tag == SIGNED.tag:
        return SIGNED
    try:
        return SHIPPED[tag]
    except KeyError:
        raise SemiringError(f"unknown semiring {tag!r}; expected one of {sorted(SHIPPED)}") from None


def require_shipped(sr: Semiring) -> Semiring:
    if sr.test_only or sr.tag not in SHIPPED:
        raise UnsupportedInstance(f"semiring {sr.tag!r} is test-only and not accepted here")
    return sr


@dataclass(frozen=True)
class SemiringValue:
    semiring: Semiring
    payload: Any

    def __post_init__(self):
        object.__setattr__(self, "payload", self.semiring.coerce(self.payload))

    def __add__(self, other):
        return sr_add(self, other)

    def __mul__(self, other):
        return sr_mul(self, other)

    def __str__(self):
        return self.semiring.format(self.payload)


def _same(a: SemiringValue, b: SemiringValue) -> Semiring:
    if a.semiring != b.semiring:
        raise InstanceMismatch(f"{a.semiring.tag} value combined with {b.semiring.tag} value")
    return a.semiring


def sr_add(a: SemiringValue, b: SemiringValue) -> SemiringValue:
    sr = _same(a, b)
    return SemiringValue(sr, sr.plus(a.payload, b.payload))


def sr_mul(a: SemiringValue, b: SemiringValue) -> SemiringValue:
    sr = _same(a, b)
    return SemiringValue(sr, sr.times(a.payload, b.payload))


@dataclass
class AxiomResult:
    axiom: str
    passed: bool
    witness: tuple | None = None


@dataclass
class AxiomReport:
    semiring: str
    results: list[AxiomResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failed(self) -> list[AxiomResult]:
        return [r for r in self.results if not r.passed]

    def __getitem__(self, axiom: str) -> AxiomResult:
        for r in self.results:
            if r.axiom == axiom:
                return r
        raise KeyError(axiom)


def sr_axiom_check(sr: Semiring, sample_values) -> AxiomReport:
    """Check the commutative-semiring laws, entireness and zerosumfreeness.

    Every pair/triple drawn from ``sample_values`` is tried; the first
    violating tuple is kept as the witness.
    """
    xs = [sr.coerce(v) for v in sample_values]
    add, mul, z, o = sr.plus, sr.times, sr.zero(), sr.one()
    checks = [
        ("add_assoc", 3, lambda a, b, c: add(add(a, b), c) == add(a, add(b, c))),
        ("mul_assoc", 3, lambda a, b, c: mul(mul(a, b), c) == mul(a, mul(b, c))),
        ("distributive", 3, lambda a, b, c: mul(a, add(b, c)) == add(mul(a, b), mul(a, c))),
        ("add_comm", 2, lambda a, b: add(a, b) == add(b, a)),
        ("mul_comm", 2, lambda a, b: mul(a, b) == mul(b, a)),
        ("entire", 2, lambda a, b: mul(a, b) != z or a == z or b == z),
        ("zerosumfree", 2, lambda a, b: add(a, b) != z or (a == z and b == z)),
        ("add_identity", 1, lambda a: add(a, z) == a),
        ("mul_identity", 1, lambda a: mul(a, o) == a and mul(o, a) == a),
        ("annihilation", 1, lambda a: mul(a, z) == z and mul(z, a) == z),
    ]
    report = AxiomReport(sr.tag)
    for name, arity, law in checks:
        witness = None
        for args in itertools.product(xs, repeat=arity):
            if not law(*args):
                witness = args
                break
        report.results.append(AxiomResult(name, witness is None, witness))
    return report
