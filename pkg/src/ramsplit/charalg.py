"""Exact arithmetic mod a prime l and sparse symbolic character classes.

Character groups of residue fields are modeled as free Z/l-modules on named
generators.  A CharClass holds values, unramified parts and Kummer symbols
alike; all its generators belong to one residue-field space.  Every space
carries an implicit canonical twist generator, so residues-of-residues are
plain Scalars and twists never materialize as data.

l is fixed per session; mixing moduli is a hard error, never a coercion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping


class ModulusMismatch(Exception):
    """Operands were built over different prime moduli."""


class SpaceMismatch(Exception):
    """Operands live in character groups of different residue fields."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True, order=True)
class PrimeModulus:
    """The prime l.  The residue characteristic is modeled only by l being a unit."""

    ell: int

    def __post_init__(self) -> None:
        if not _is_prime(self.ell):
            raise ValueError(f"modulus {self.ell} is not prime")


@dataclass(frozen=True)
class Scalar:
    """An element of Z/l, always stored reduced."""

    value: int
    modulus: PrimeModulus

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", self.value % self.modulus.ell)

    def _check(self, other: "Scalar") -> None:
        if self.modulus != other.modulus:
            raise ModulusMismatch(f"{self.modulus.ell} vs {other.modulus.ell}")

    def __add__(self, other: "Scalar") -> "Scalar":
        self._check(other)
        return Scalar(self.value + other.value, self.modulus)

    def __sub__(self, other: "Scalar") -> "Scalar":
        self._check(other)
        return Scalar(self.value - other.value, self.modulus)

    def __mul__(self, other: "Scalar") -> "Scalar":
        self._check(other)
        return Scalar(self.value * other.value, self.modulus)

    def __neg__(self) -> "Scalar":
        return Scalar(-self.value, self.modulus)

    def inv(self) -> "Scalar":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse mod a prime")
        return Scalar(pow(self.value, -1, self.modulus.ell), self.modulus)

    @property
    def is_zero(self) -> bool:
        return self.value == 0


@dataclass(frozen=True, order=True)
class GeneratorId:
    """A named basis element of one residue-field character space."""

    name: str
    space: str


@dataclass(frozen=True)
class CharClass:
    """Sparse mod-l combination of generators; canonical (no zero terms, sorted)."""

    modulus: PrimeModulus
    terms: tuple[tuple[GeneratorId, int], ...]

    @classmethod
    def make(cls, modulus: PrimeModulus, coeffs: Mapping[GeneratorId, object]) -> "CharClass":
        reduced: dict[GeneratorId, int] = {}
        for gen, c in coeffs.items():
            v = (c.value if isinstance(c, Scalar) else int(c)) % modulus.ell
            if v:
                reduced[gen] = v
        spaces = {gen.space for gen in reduced}
        if len(spaces) > 1:
            raise SpaceMismatch(f"mixed spaces {sorted(spaces)}")
        return cls(modulus, tuple(sorted(reduced.items())))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def space(self) -> str | None:
        """The residue-field space, or None for the (space-neutral) zero class."""
        return self.terms[0][0].space if self.terms else None

    def items(self) -> Iterator[tuple[GeneratorId, int]]:
        return iter(self.terms)

    def coeff(self, gen: GeneratorId) -> int:
        return dict(self.terms).get(gen, 0)

    def __add__(self, other: "CharClass") -> "CharClass":
        return add(self, other)

    def __sub__(self, other: "CharClass") -> "CharClass":
        return add(self, scale(Scalar(-1, self.modulus), other))

    def __neg__(self) -> "CharClass":
        return scale(Scalar(-1, self.modulus), self)


def zero(modulus: PrimeModulus) -> CharClass:
    return CharClass(modulus, ())


def _check_pair(a: CharClass, b: CharClass, spaces: bool = True) -> None:
    if a.modulus != b.modulus:
        raise ModulusMismatch(f"{a.modulus.ell} vs {b.modulus.ell}")
    if spaces and a.space is not None and b.space is not None and a.space != b.space:
        raise SpaceMismatch(f"{a.space} vs {b.space}")


def add(a: CharClass, b: CharClass) -> CharClass:
    _check_pair(a, b)
    out = dict(a.terms)
    for gen, c in b.terms:
        out[gen] = out.get(gen, 0) + c
    return CharClass.make(a.modulus, out)


def scale(n: Scalar, a: CharClass) -> CharClass:
    if n.modulus != a.modulus:
        raise ModulusMismatch(f"{n.modulus.ell} vs {a.modulus.ell}")
    return CharClass.make(a.modulus, {gen: c * n.value for gen, c in a.terms})


def same_line(a: CharClass, b: CharClass) -> bool:
    """Decide <a> = <b>: true iff a = u*b for a unit u, or both are zero."""
    _check_pair(a, b)
    if a.is_zero or b.is_zero:
        return a.is_zero and b.is_zero
    return solve_ratio(a, b) is not None


def solve_ratio(a: CharClass, b: CharClass) -> Scalar | None:
    """The n with a = n*b, or None.  (0, 0) resolves to 1 deterministically."""
    _check_pair(a, b)
    if b.is_zero:
        return Scalar(1, a.modulus) if a.is_zero else None
    if a.is_zero:
        return Scalar(0, a.modulus)
    gen, c = b.terms[0]
    n = Scalar(a.coeff(gen), a.modulus) * Scalar(c, a.modulus).inv()
    return n if scale(n, b) == a else None


def order(a: CharClass) -> int:
    return 1 if a.is_zero else a.modulus.ell


# ---------------------------------------------------------------- json


def generator_key(gen: GeneratorId) -> str:
    return f"{gen.space}:{gen.name}"


def generator_from_key(key: str) -> GeneratorId:
    space, _, name = key.partition(":")
    if not name:
        raise ValueError(f"bad generator key {key!r}")
    return GeneratorId(name, space)


def char_to_json(a: CharClass) -> dict:
    return {
        "modulus": a.modulus.ell,
        "terms": {generator_key(gen): c for gen, c in a.terms},
    }


def char_from_json(doc: Mapping) -> CharClass:
    modulus = PrimeModulus(int(doc["modulus"]))
    terms: dict[GeneratorId, int] = {}
    for key, c in doc["terms"].items():
        c = int(c)
        if not 0 < c < modulus.ell:
            raise ValueError(f"non-canonical coefficient {c} for {key!r}")
        terms[generator_from_key(key)] = c
    return CharClass.make(modulus, terms)
