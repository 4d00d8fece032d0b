"""Words and linear combinations in a free associative algebra.

A word is a tuple of generator indices; the empty tuple is 1.  Words are
ordered degree-lexicographically: first by weighted degree, then by the
letters compared left to right in generator order.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .exactla import FieldSpec, Scalar

Word = Tuple[int, ...]

EMPTY: Word = ()


@dataclass(frozen=True)
class GeneratorInfo:
    name: str
    degree: int = 1

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError(f"generator {self.name} must have positive degree")


def word_degree(word: Word, weights: Sequence[int]) -> int:
    return sum(weights[letter] for letter in word)


def word_key(word: Word, weights: Sequence[int]) -> Tuple[int, Word]:
    return word_degree(word, weights), word


def compare_words(a: Word, b: Word, weights: Sequence[int]) -> int:
    """-1, 0 or 1 as ``a`` is smaller, equal or larger than ``b`` in deglex."""
    ka, kb = word_key(a, weights), word_key(b, weights)
    return (ka > kb) - (ka < kb)


@lru_cache(maxsize=None)
def _words_of_degree(weights: Tuple[int, ...], d: int) -> Tuple[Word, ...]:
    if d == 0:
        return (EMPTY,)
    out = []
    for letter, w in enumerate(weights):
        if w <= d:
            out.extend((letter,) + rest for rest in _words_of_degree(weights, d - w))
    return tuple(out)


def enumerate_words(gens: Sequence[GeneratorInfo], d: int) -> List[Word]:
    """All words of degree exactly ``d`` in increasing deglex order."""
    if d < 0:
        return []
    return list(_words_of_degree(tuple(g.degree for g in gens), d))


class FreeElement(object):
    """A finite linear combination of words with nonzero coefficients."""

    __slots__ = ("terms", "field")

    def __init__(self, terms: Mapping[Word, Scalar], field: FieldSpec):
        self.field = field
        clean = {}
        for word, coeff in terms.items():
            coeff = field.coerce(coeff)
            if coeff:
                clean[tuple(word)] = coeff
        self.terms: Dict[Word, Scalar] = clean

    @classmethod
    def zero(cls, field: FieldSpec) -> "FreeElement":
        return cls({}, field)

    @classmethod
    def one(cls, field: FieldSpec) -> "FreeElement":
        return cls({EMPTY: 1}, field)

    @classmethod
    def monomial(cls, word: Iterable[int], field: FieldSpec, coeff: Scalar = 1) -> "FreeElement":
        return cls({tuple(word): coeff}, field)

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self) -> Iterator[Tuple[Word, Scalar]]:
        return iter(self.terms.items())

    def __eq__(self, other):
        if not isinstance(other, FreeElement):
            return NotImplemented
        return self.field == other.field and self.terms == other.terms

    def __hash__(self):
        return hash((self.field, frozenset(self.terms.items())))

    def __repr__(self):
        return f"FreeElement({self.terms!r}, {self.field})"

    def words(self) -> List[Word]:
        return list(self.terms)

    def coefficient(self, word: Word) -> Scalar:
        return self.terms.get(tuple(word), self.field.coerce(0))

    def _check(self, other: "FreeElement"):
        if self.field != other.field:
            raise ValueError(f"elements over {self.field} and {other.field} don't mix")

    def __add__(self, other: "FreeElement") -> "FreeElement":
        self._check(other)
        terms = dict(self.terms)
        for word, coeff in other.terms.items():
            terms[word] = terms.get(word, 0) + coeff
        return FreeElement(terms, self.field)

    def __neg__(self) -> "FreeElement":
        return self.scale(-1)

    def __sub__(self, other: "FreeElement") -> "FreeElement":
        return self + (-other)

    def __mul__(self, other: "FreeElement") -> "FreeElement":
        return multiply(self, other)

    def scale(self, c: Scalar) -> "FreeElement":
        c = self.field.coerce(c)
        return FreeElement({w: v * c for w, v in self.terms.items()}, self.field)

    def degrees(self, weights: Sequence[int]) -> List[int]:
        return sorted({word_degree(w, weights) for w in self.terms})

    def is_homogeneous(self, weights: Sequence[int]) -> bool:
        return len(self.degrees(weights)) <= 1

    def degree(self, weights: Sequence[int]) -> Optional[int]:
        """Top degree, or None for zero."""
        degrees = self.degrees(weights)
        return degrees[-1] if degrees else None

    def homogeneous_parts(self, weights: Sequence[int]) -> Dict[int, "FreeElement"]:
        parts: Dict[int, Dict[Word, Scalar]] = {}
        for word, coeff in self.terms.items():
            parts.setdefault(word_degree(word, weights), {})[word] = coeff
        return {d: FreeElement(t, self.field) for d, t in parts.items()}

    def leading(self, weights: Sequence[int]) -> Tuple[Word, Scalar]:
        word = max(self.terms, key=lambda w: word_key(w, weights))
        return word, self.terms[word]

    def sorted_terms(self, weights: Sequence[int], reverse: bool = True) -> List[Tuple[Word, Scalar]]:
        return sorted(self.terms.items(), key=lambda t: word_key(t[0], weights), reverse=reverse)

    def monic(self, weights: Sequence[int]) -> "FreeElement":
        _, coeff = self.leading(weights)
        return self.scale(self.field.inv(coeff))

    def reverse_words(self) -> "FreeElement":
        return FreeElement({w[::-1]: c for w, c in self.terms.items()}, self.field)

    def relabel(self, mapping: Sequence[int]) -> "FreeElement":
        """Rename letters: letter ``i`` becomes ``mapping[i]``."""
        return FreeElement(
            {tuple(mapping[i] for i in w): c for w, c in self.terms.items()}, self.field
        )


def multiply(a: FreeElement, b: FreeElement) -> FreeElement:
    """Bilinear extension of word concatenation."""
    a._check(b)
    f = a.field
    terms: Dict[Word, Scalar] = {}
    for u, cu in a.terms.items():
        for v, cv in b.terms.items():
            w = u + v
            terms[w] = terms.get(w, 0) + cu * cv
    return FreeElement(terms, f)


def power(a: FreeElement, n: int) -> FreeElement:
    result = FreeElement.one(a.field)
    for _ in range(n):
        result = multiply(result, a)
    return result


def substitute(e: FreeElement, images: Sequence[FreeElement]) -> FreeElement:
    """Apply the algebra map sending generator ``i`` to ``images[i]``."""
    f = e.field
    total: Dict[Word, Scalar] = {}
    for word, coeff in e.terms.items():
        product = FreeElement.one(f)
        for letter in word:
            product = multiply(product, images[letter])
        for w, c in product.terms.items():
            total[w] = total.get(w, 0) + coeff * c
    return FreeElement(total, f)


def format_word(word: Word, names: Sequence[str]) -> str:
    if not word:
        return "1"
    parts = []
    i = 0
    while i < len(word):
        j = i
        while j < len(word) and word[j] == word[i]:
            j += 1
        name = names[word[i]]
        parts.append(name if j - i == 1 else f"{name}^{j - i}")
        i = j
    return "*".join(parts)


def format_element(e: FreeElement, names: Sequence[str], weights: Sequence[int]) -> str:
    if not e:
        return "0"
    out = []
    for word, coeff in e.sorted_terms(weights):
        sign = "+"
        if e.field.is_rational and coeff < 0:
            sign, coeff = "-", -coeff
        body = format_word(word, names)
        if coeff == 1:
            term = body
        elif not word:
            term = str(coeff)
        else:
            term = f"{coeff}*{body}"
        out.append((sign, term))
    text = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, term in out[1:]:
        text += f" {sign} {term}"
    return text
