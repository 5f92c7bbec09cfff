"""Positional numeration systems: base q and Zeckendorf.

Conventions used throughout:

* Digit words are most-significant-digit first.
* Fibonacci numbers are indexed so that F_0 = 1, F_1 = 2, F_2 = 3, ...
  (with F_{-2} = 0 and F_{-1} = 1); the Zeckendorf value of a word
  b_{k-1} ... b_1 b_0 is sum b_i * F_i.
* The canonical Zeckendorf expansion is the greedy one; it never contains
  two adjacent ones, and canonical(0) is the single digit 0.

The shift map ``phi`` appends a zero digit to the Zeckendorf expansion.
It is defined here by digit manipulation; the closed forms using the
golden ratio are provided separately (``phi_via_floor``) so the two can
be checked against each other, and are computed exactly with integer
square roots, never with floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt
from typing import Iterable, Sequence, Union


class NumerationError(ValueError):
    """Bad digits, malformed word text, or an out-of-domain argument."""


@dataclass(frozen=True)
class Base:
    """Base-q positional numeration, q >= 2."""

    q: int

    def __post_init__(self):
        if not isinstance(self.q, int) or self.q < 2:
            raise NumerationError(f"base must be an integer >= 2, got {self.q!r}")


@dataclass(frozen=True)
class Zeckendorf:
    """Fibonacci (Zeckendorf) numeration."""


ZECKENDORF = Zeckendorf()
NumerationKind = Union[Base, Zeckendorf]


_fib_cache = [0, 1]  # _fib_cache[i + 2] == F_i


def fib(i: int) -> int:
    """F_i with F_{-2} = 0, F_{-1} = 1, F_0 = 1, F_1 = 2, F_2 = 3, ..."""
    if i < -2:
        raise NumerationError(f"Fibonacci index out of range: {i}")
    while len(_fib_cache) < i + 3:
        _fib_cache.append(_fib_cache[-1] + _fib_cache[-2])
    return _fib_cache[i + 2]


@dataclass(frozen=True)
class DigitWord:
    """A digit word, most significant digit first, over a declared alphabet."""

    digits: tuple[int, ...]
    alphabet: frozenset[int] = field(default=frozenset((0, 1)))

    def __post_init__(self):
        bad = [d for d in self.digits if d not in self.alphabet]
        if bad:
            raise NumerationError(
                f"digit {bad[0]} outside declared alphabet {sorted(self.alphabet)}")

    def __len__(self):
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    def __getitem__(self, i):
        return self.digits[i]

    def __str__(self):
        return format_word(self.digits)


Digits = Union[DigitWord, str, Sequence[int]]


def as_digits(w: Digits) -> tuple[int, ...]:
    if isinstance(w, DigitWord):
        return w.digits
    if isinstance(w, str):
        return parse_word(w).digits
    return tuple(w)


def format_word(digits: Iterable[int]) -> str:
    """Concatenated digits when they all lie in 0..9, else comma-separated."""
    digits = tuple(digits)
    if all(0 <= d <= 9 for d in digits):
        return "".join(str(d) for d in digits)
    return ",".join(str(d) for d in digits)


def parse_word(text: str) -> DigitWord:
    """Inverse of ``format_word``; the alphabet becomes the digits seen."""
    text = text.strip()
    if text == "":
        digits: tuple[int, ...] = ()
    elif "," in text or "-" in text:
        try:
            digits = tuple(int(part) for part in text.split(","))
        except ValueError:
            raise NumerationError(f"bad digit word {text!r}") from None
    else:
        if not text.isdigit():
            raise NumerationError(f"bad digit word {text!r}")
        digits = tuple(int(ch) for ch in text)
    alphabet = frozenset(digits) | frozenset((0, 1))
    return DigitWord(digits, alphabet)


def word_alphabet(kind: NumerationKind) -> tuple[int, ...]:
    """Digit alphabet of canonical expansions for the given numeration."""
    if isinstance(kind, Base):
        return tuple(range(kind.q))
    return (0, 1)


def canonical(n: int, kind: NumerationKind = ZECKENDORF) -> DigitWord:
    """Canonical expansion of n >= 0; the single digit 0 for n = 0."""
    if not isinstance(n, int) or n < 0:
        raise NumerationError(f"canonical expansion needs n >= 0, got {n!r}")
    alphabet = frozenset(word_alphabet(kind))
    if n == 0:
        return DigitWord((0,), alphabet)
    if isinstance(kind, Base):
        digits = []
        while n:
            n, d = divmod(n, kind.q)
            digits.append(d)
        return DigitWord(tuple(reversed(digits)), alphabet)
    k = 0
    while fib(k + 1) <= n:
        k += 1
    digits = []
    rem = n
    for i in range(k, -1, -1):
        if fib(i) <= rem:
            digits.append(1)
            rem -= fib(i)
        else:
            digits.append(0)
    return DigitWord(tuple(digits), alphabet)


def value(w: Digits, kind: NumerationKind = ZECKENDORF) -> int:
    """Numerical value of a digit word (any digits, not only canonical)."""
    digits = as_digits(w)
    if isinstance(kind, Base):
        out = 0
        for d in digits:
            out = out * kind.q + d
        return out
    k = len(digits)
    return sum(d * fib(k - 1 - pos) for pos, d in enumerate(digits))


def has_adjacent_ones(w: Digits) -> bool:
    digits = as_digits(w)
    return any(a == 1 and b == 1 for a, b in zip(digits, digits[1:]))


def pad(w: Digits, length: int, alphabet: frozenset[int] | None = None) -> DigitWord:
    """Left-pad with zeros to the requested length."""
    digits = as_digits(w)
    if len(digits) > length:
        raise NumerationError(f"word of length {len(digits)} does not fit in {length}")
    padded = (0,) * (length - len(digits)) + digits
    if alphabet is None:
        alphabet = frozenset(padded) | frozenset((0, 1))
    return DigitWord(padded, alphabet)


def digit_add(u: Digits, v: Digits) -> DigitWord:
    """Elementwise digit sum of two words of equal length."""
    a, b = as_digits(u), as_digits(v)
    if len(a) != len(b):
        raise NumerationError(f"length mismatch: {len(a)} vs {len(b)}")
    digits = tuple(x + y for x, y in zip(a, b))
    return DigitWord(digits, frozenset(digits) | frozenset((0, 1)))


def digit_sub(u: Digits, v: Digits) -> DigitWord:
    """Elementwise digit difference of two words of equal length."""
    a, b = as_digits(u), as_digits(v)
    if len(a) != len(b):
        raise NumerationError(f"length mismatch: {len(a)} vs {len(b)}")
    digits = tuple(x - y for x, y in zip(a, b))
    return DigitWord(digits, frozenset(digits) | frozenset((0, 1)))


# The Zeckendorf shift and its companions.  phi appends a zero digit; it
# is strictly increasing, and value(w + (b,)) == phi(value(w)) + b for
# every 0/1 word w, canonical or not.

def phi(n: int) -> int:
    """Shift: value of the canonical expansion of n with a 0 appended."""
    w = canonical(n, ZECKENDORF)
    return value(w.digits + (0,), ZECKENDORF)


def phi_iter(n: int, i: int) -> int:
    """i-fold application of phi, i >= 0."""
    if i < 0:
        raise NumerationError(f"phi_iter needs i >= 0, got {i}")
    for _ in range(i):
        n = phi(n)
    return n


def phi_preimage(m: int, i: int = 1) -> int | None:
    """The k with phi^i(k) = m, or None when m is not an i-fold shift."""
    if i < 0:
        raise NumerationError(f"phi_preimage needs i >= 0, got {i}")
    if i == 0:
        return m
    if m == 0:
        return 0
    w = canonical(m, ZECKENDORF).digits
    if len(w) <= i or any(d != 0 for d in w[-i:]):
        return None
    k = value(w[:-i], ZECKENDORF)
    return k if phi_iter(k, i) == m else None


def lam(n: int) -> int:
    """Drop the least significant Zeckendorf digit and reindex.

    Writing n = sum b_i F_i, returns sum over i >= 1 of b_i F_{i-1}.
    A left inverse of phi: lam(phi(n)) == n for all n >= 0.
    """
    w = canonical(n, ZECKENDORF).digits
    return value(w[:-1], ZECKENDORF)


def delta(m: int, n: int) -> int:
    """Shift defect phi(m + n) - phi(m) - phi(n); always in {-1, 0, 1}."""
    return phi(m + n) - phi(m) - phi(n)


def support(n: int) -> frozenset[int]:
    """Indices i with b_i = 1 in the canonical expansion of n."""
    w = canonical(n, ZECKENDORF).digits
    k = len(w)
    return frozenset(k - 1 - pos for pos, d in enumerate(w) if d == 1)


# Exact golden-ratio floor formulas.  floor(k * phi) for k >= 0 equals
# (k + isqrt(5 k^2)) // 2 because 5 k^2 is never a perfect square for
# k >= 1, so isqrt(5 k^2) = floor(k * sqrt(5)) exactly.

def floor_phi(k: int) -> int:
    """floor(k * (1 + sqrt 5)/2), computed exactly."""
    if k < 0:
        raise NumerationError(f"floor_phi needs k >= 0, got {k}")
    return (k + isqrt(5 * k * k)) // 2


def floor_phi2(k: int) -> int:
    """floor(k * phi^2) = k + floor(k * phi), using phi^2 = phi + 1."""
    return k + floor_phi(k)


def phi_via_floor(n: int) -> int:
    """Closed form floor(phi*n + phi - 1) for the shift map."""
    return floor_phi(n + 1) - 1


def phi2_via_floor(n: int) -> int:
    """Closed form floor(phi^2*n + phi - 1) for the double shift."""
    return n + phi_via_floor(n)
