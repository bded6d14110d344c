"""
Exact scalars in Q(sqrt2, sqrt5) and noncommutative polynomials over them.

A letter is (party, setting) and stands for a Hermitian involution. Letters
of different parties commute; letters of one party do not. Words are kept
canonical: grouped into party blocks in increasing party order, each block a
reduced word (no two equal adjacent letters).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt

import sympy

from apps.core.exceptions import InputRangeError

Letter = tuple[int, int]
Word = tuple[Letter, ...]

SQRT_BASIS = (sympy.Integer(1), sympy.sqrt(2), sympy.sqrt(5), sympy.sqrt(10))


@dataclass(frozen=True)
class ExtScalar:
    """a + b sqrt2 + c sqrt5 + d sqrt10 with rational a, b, c, d."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    c: Fraction = Fraction(0)
    d: Fraction = Fraction(0)

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    @classmethod
    def coerce(cls, value) -> ExtScalar:
        if isinstance(value, ExtScalar):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(Fraction(value))
        raise TypeError(f"Cannot use {type(value).__name__} as an exact scalar.")

    @classmethod
    def from_sympy(cls, expr) -> ExtScalar:
        parts = dict.fromkeys(SQRT_BASIS, sympy.Integer(0))
        for term, coeff in sympy.expand(expr).as_coefficients_dict().items():
            if term not in parts or not coeff.is_Rational:
                raise InputRangeError(f"{expr} is not in Q(sqrt2, sqrt5).")
            parts[term] += coeff
        rationals = (sympy.Rational(parts[k]) for k in SQRT_BASIS)
        return cls(*(Fraction(int(v.p), int(v.q)) for v in rationals))

    def to_sympy(self):
        return sum(
            (sympy.Rational(x.numerator, x.denominator) * basis for x, basis in zip(self.parts, SQRT_BASIS)),
            sympy.Integer(0),
        )

    # ------------------------------------------------------------------
    # Field operations
    # ------------------------------------------------------------------

    @property
    def parts(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c, self.d)

    def is_zero(self) -> bool:
        return not any(self.parts)

    def __add__(self, other):
        if not isinstance(other, (ExtScalar, int, Fraction)):
            return NotImplemented
        other = ExtScalar.coerce(other)
        return ExtScalar(*(x + y for x, y in zip(self.parts, other.parts)))

    __radd__ = __add__

    def __neg__(self):
        return ExtScalar(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, other):
        if not isinstance(other, (ExtScalar, int, Fraction)):
            return NotImplemented
        return self + (-ExtScalar.coerce(other))

    def __rsub__(self, other):
        return ExtScalar.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, (ExtScalar, int, Fraction)):
            return NotImplemented
        a, b, c, d = self.parts
        e, f, g, h = ExtScalar.coerce(other).parts
        return ExtScalar(
            a * e + 2 * b * f + 5 * c * g + 10 * d * h,
            a * f + b * e + 5 * (c * h + d * g),
            a * g + c * e + 2 * (b * h + d * f),
            a * h + d * e + b * g + c * f,
        )

    __rmul__ = __mul__

    def _conjugate(self, flip2: bool, flip5: bool) -> ExtScalar:
        s2, s5 = (-1 if flip2 else 1), (-1 if flip5 else 1)
        return ExtScalar(self.a, s2 * self.b, s5 * self.c, s2 * s5 * self.d)

    def inverse(self) -> ExtScalar:
        """Multiply by the three Galois conjugates; their product with self is rational."""
        if self.is_zero():
            raise ZeroDivisionError("ExtScalar division by zero")
        others = self._conjugate(True, False) * self._conjugate(False, True) * self._conjugate(True, True)
        norm = (self * others).a
        return others * (1 / norm)

    def __truediv__(self, other):
        return self * ExtScalar.coerce(other).inverse()

    def __rtruediv__(self, other):
        return ExtScalar.coerce(other) * self.inverse()

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * sqrt(2) + float(self.c) * sqrt(5) + float(self.d) * sqrt(10)

    def is_positive(self) -> bool:
        return bool(self.to_sympy().is_positive)

    def __str__(self) -> str:
        labels = ("", "sqrt2", "sqrt5", "sqrt10")
        terms = [f"{x}*{label}" if label else f"{x}" for x, label in zip(self.parts, labels) if x]
        return " + ".join(f"({t})" for t in terms) if terms else "0"


SQRT2 = ExtScalar(b=1)
SQRT5 = ExtScalar(c=1)
SQRT10 = ExtScalar(d=1)


def canonical_word(word) -> Word:
    """Stable-sort letters by party, then cancel equal adjacent letters inside each block."""
    reduced: list[Letter] = []
    for letter in sorted(word, key=lambda letter: letter[0]):
        if reduced and reduced[-1] == letter:
            reduced.pop()
        else:
            reduced.append(letter)
    return tuple(reduced)


@dataclass(frozen=True, eq=False)
class NcPolynomial:
    terms: dict[Word, ExtScalar] = field(default_factory=dict)

    def __post_init__(self):
        merged: dict[Word, ExtScalar] = {}
        for word, coeff in self.terms.items():
            key = canonical_word(word)
            merged[key] = merged.get(key, ExtScalar()) + ExtScalar.coerce(coeff)
        object.__setattr__(self, "terms", {w: c for w, c in sorted(merged.items()) if not c.is_zero()})

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def constant(cls, value) -> NcPolynomial:
        return cls({(): ExtScalar.coerce(value)})

    @classmethod
    def letter(cls, party: int, setting: int) -> NcPolynomial:
        if party < 0 or setting < 0:
            raise InputRangeError("Party and setting indices must be non-negative.")
        return cls({((party, setting),): ExtScalar(1)})

    # ------------------------------------------------------------------
    # Ring operations
    # ------------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, ExtScalar)):
            other = NcPolynomial.constant(other)
        return isinstance(other, NcPolynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    @staticmethod
    def _lift(value) -> NcPolynomial:
        return value if isinstance(value, NcPolynomial) else NcPolynomial.constant(value)

    def __add__(self, other):
        other = NcPolynomial._lift(other)
        merged = dict(self.terms)
        for word, coeff in other.terms.items():
            merged[word] = merged.get(word, ExtScalar()) + coeff
        return NcPolynomial(merged)

    __radd__ = __add__

    def __neg__(self):
        return NcPolynomial({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-NcPolynomial._lift(other))

    def __rsub__(self, other):
        return NcPolynomial._lift(other) - self

    def __mul__(self, other):
        other = NcPolynomial._lift(other)
        product: dict[Word, ExtScalar] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                key = canonical_word(w1 + w2)
                product[key] = product.get(key, ExtScalar()) + c1 * c2
        return NcPolynomial(product)

    def __rmul__(self, other):
        return NcPolynomial._lift(other) * self

    def adjoint(self) -> NcPolynomial:
        """Reverse every word; coefficients are real."""
        return NcPolynomial({tuple(reversed(w)): c for w, c in self.terms.items()})

    def is_hermitian(self) -> bool:
        return self == self.adjoint()

    def coefficient(self, word) -> ExtScalar:
        return self.terms.get(canonical_word(word), ExtScalar())

    def parties(self) -> set[int]:
        return {party for word in self.terms for party, _ in word}

    def __len__(self) -> int:
        return len(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"

        def render(word: Word) -> str:
            return "*".join(f"{chr(ord('A') + p)}{s}" for p, s in word) or "1"

        return " + ".join(f"[{c}]*{render(w)}" for w, c in self.terms.items())


@dataclass(frozen=True, eq=False)
class SosVerdict:
    """
    Outcome of checking target = sum_i w_i s_i* s_i.

    exact:    all w_i = 1
    scaled:   all w_i equal one scale (reported in `scale`)
    weighted: individual w_i (reported in `weights`)
    mismatch: no such w exists
    """

    exact_match: bool
    residual: NcPolynomial
    scale: ExtScalar | None = None
    weights: tuple[ExtScalar, ...] | None = None
    notes: tuple[str, ...] = ()

    @property
    def verdict(self) -> str:
        if self.exact_match:
            return "exact"
        if self.scale is not None:
            return "scaled"
        if self.weights is not None:
            return "weighted"
        return "mismatch"

    @property
    def certified(self) -> bool:
        """True when the identity proves target >= 0 (every square enters with a positive weight)."""
        if self.exact_match:
            return True
        if self.scale is not None:
            return self.scale.is_positive()
        if self.weights is not None:
            return all(w.is_positive() for w in self.weights)
        return False
