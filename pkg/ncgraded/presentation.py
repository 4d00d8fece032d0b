"""Presentations of connected graded algebras.

A presentation lists weighted generators and homogeneous relations over an
exact field.  This module also parses the small line-oriented input
language, builds the standard constructions (opposite, enveloping, skew
polynomial rings, Ore extensions, homogenization) and ships the builtin
corpus.
"""

import logging
import os
import re
from dataclasses import dataclass, field as dc_field, replace
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple, Union

from . import exceptions
from .exactla import FieldSpec, Scalar, SparseMatrix, kernel_vectors, rank
from .freealg import (
    EMPTY,
    FreeElement,
    GeneratorInfo,
    Word,
    format_element,
    multiply,
    power,
    substitute,
)

logger = logging.getLogger(__name__)

CORPUS_DIR = os.path.join(os.path.dirname(__file__), "corpus")

RIGHT_SUFFIX = "_op"


@dataclass(frozen=True)
class Presentation:
    field: FieldSpec
    generators: Tuple[GeneratorInfo, ...]
    relations: Tuple[FreeElement, ...]
    label: str = "A"
    notes: Tuple[str, ...] = dc_field(default=())

    def __post_init__(self):
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise exceptions.InputError(f"duplicate generator names in {names}")
        weights = self.weights
        for r in self.relations:
            if r.field != self.field:
                raise exceptions.InputError(f"relation over {r.field} in an algebra over {self.field}")
            degrees = r.degrees(weights)
            if not degrees:
                raise exceptions.InputError("zero relation")
            if len(degrees) > 1:
                raise exceptions.InputError(
                    f"relation {format_element(r, names, weights)} is not homogeneous"
                )
            if degrees[0] == 0:
                raise exceptions.InputError("relation of degree 0")

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    @property
    def weights(self) -> Tuple[int, ...]:
        return tuple(g.degree for g in self.generators)

    @property
    def max_relation_degree(self) -> int:
        return max((r.degree(self.weights) for r in self.relations), default=0)

    @property
    def standard_graded(self) -> bool:
        return all(w == 1 for w in self.weights)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def gen(self, name: str) -> FreeElement:
        return FreeElement.monomial((self.index(name),), self.field)

    def element(self, text: str) -> FreeElement:
        """Parse a polynomial in this presentation's generators."""
        return _PolynomialParser(text, self.names, self.field, line=1).parse()

    def format(self, e: FreeElement) -> str:
        return format_element(e, self.names, self.weights)

    def with_field(self, field: FieldSpec) -> "Presentation":
        relations = tuple(
            FreeElement({w: _recoerce(c, field) for w, c in r.terms.items()}, field)
            for r in self.relations
        )
        return replace(self, field=field, relations=relations)


@dataclass(frozen=True)
class FilteredPresentation:
    """Generators with filtration weights and possibly inhomogeneous relations."""

    field: FieldSpec
    generators: Tuple[GeneratorInfo, ...]
    relations: Tuple[FreeElement, ...]
    label: str = "A"

    def __post_init__(self):
        for r in self.relations:
            if not r:
                raise exceptions.InputError("zero relation")

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    @property
    def weights(self) -> Tuple[int, ...]:
        return tuple(g.degree for g in self.generators)


def _recoerce(value, field: FieldSpec):
    # prime-field scalars are kept as ints; rationals keep exact values
    return field.coerce(value)


# ----- DSL ----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<number>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>[-+*^()=]))"
)


class _PolynomialParser(object):
    """Recursive descent over ``+ - * ^ ( )`` with integer/rational constants."""

    def __init__(self, text, names, field, line, column_offset=0):
        self.text = text
        self.names = list(names)
        self.field = field
        self.line = line
        self.offset = column_offset
        self.tokens = self._tokenize(text)
        self.pos = 0

    def _error(self, message, column):
        raise exceptions.DSLSyntaxError(message, self.line, column + self.offset + 1)

    def _tokenize(self, text):
        tokens = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            match = _TOKEN.match(text, pos)
            if not match:
                column = pos + len(text[pos:]) - len(text[pos:].lstrip())
                self._error(f"unexpected character '{text[column]}'", column)
            kind = match.lastgroup
            column = match.start(kind)
            tokens.append((kind, match.group(kind), column))
            pos = match.end()
        return tokens

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None, len(self.text))

    def _take(self):
        token = self._peek()
        self.pos += 1
        return token

    def parse(self) -> FreeElement:
        if not self.tokens:
            self._error("empty polynomial", 0)
        value = self._expression()
        kind, text, column = self._peek()
        if kind == "op" and text == "=":
            self._take()
            value = value - self._expression()
            kind, text, column = self._peek()
        if kind is not None:
            self._error(f"unexpected '{text}'", column)
        return value

    def _expression(self) -> FreeElement:
        kind, text, _ = self._peek()
        sign = 1
        if kind == "op" and text in "+-":
            self._take()
            sign = -1 if text == "-" else 1
        value = self._term().scale(sign)
        while True:
            kind, text, _ = self._peek()
            if kind == "op" and text in "+-":
                self._take()
                term = self._term()
                value = value + term if text == "+" else value - term
            else:
                return value

    def _term(self) -> FreeElement:
        value = self._factor()
        while True:
            kind, text, _ = self._peek()
            if kind == "op" and text == "*":
                self._take()
                value = multiply(value, self._factor())
            else:
                return value

    def _factor(self) -> FreeElement:
        value = self._atom()
        kind, text, _ = self._peek()
        if kind == "op" and text == "^":
            self._take()
            kind, text, column = self._take()
            if kind != "number" or "/" in text:
                self._error("exponent must be a nonnegative integer", column)
            value = power(value, int(text))
        return value

    def _atom(self) -> FreeElement:
        kind, text, column = self._take()
        if kind == "number":
            try:
                return FreeElement({EMPTY: Fraction(text)}, self.field)
            except ZeroDivisionError:
                self._error(f"'{text}' is not a field element", column)
        if kind == "name":
            if text not in self.names:
                raise exceptions.UnknownGeneratorError(text, self.line, column + self.offset + 1)
            return FreeElement.monomial((self.names.index(text),), self.field)
        if kind == "op" and text == "(":
            value = self._expression()
            kind, text, close_column = self._take()
            if kind != "op" or text != ")":
                self._error("expected ')'", close_column)
            return value
        if kind is None:
            self._error("unexpected end of polynomial", column)
        self._error(f"unexpected '{text}'", column)


_HEADER = re.compile(r"(?P<filtered>filtered\s+)?algebra\s+(?P<label>[\w.\-]+)\s+over\s+(?P<field>\S+)$")
_DEGREE = re.compile(r"\s*(?P<name>[A-Za-z_][A-Za-z0-9_']*)\s*=\s*(?P<degree>-?\d+)\s*$")


def _statements(text: str):
    """Yield (line number, column offset, statement) split on newlines and ';'."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        start = 0
        for chunk in line.split(";"):
            stripped = chunk.strip()
            if stripped:
                yield lineno, start + chunk.index(stripped), stripped
            start += len(chunk) + 1


def _parse_parts(text: str, field: Optional[FieldSpec]):
    header = None
    generators: List[GeneratorInfo] = []
    relations: List[Tuple[int, str, FreeElement]] = []
    notes: List[str] = []
    for lineno, offset, statement in _statements(text):
        keyword = statement.split(None, 1)[0]
        if header is None:
            match = _HEADER.match(statement)
            if not match:
                raise exceptions.DSLSyntaxError(
                    "expected 'algebra <name> over <field>'", lineno, offset + 1
                )
            header = match
            if field is None:
                field = FieldSpec.parse(match.group("field"))
            continue
        if keyword == "deg":
            body = statement[3:]
            for item in body.split(","):
                match = _DEGREE.match(item)
                if not match:
                    raise exceptions.DSLSyntaxError(
                        f"bad degree declaration '{item.strip()}'", lineno, offset + 1
                    )
                degree = int(match.group("degree"))
                if degree < 1:
                    raise exceptions.DSLSyntaxError(
                        f"generator {match.group('name')} needs a positive degree",
                        lineno,
                        offset + 1,
                    )
                generators.append(GeneratorInfo(match.group("name"), degree))
        elif keyword == "rel":
            body = statement[3:]
            names = [g.name for g in generators]
            element = _PolynomialParser(body, names, field, lineno, offset + 3).parse()
            if not element:
                raise exceptions.ZeroRelationError(lineno)
            relations.append((lineno, body.strip(), element))
        elif keyword == "note":
            notes.append(statement[4:].strip())
        else:
            raise exceptions.DSLSyntaxError(f"unknown statement '{keyword}'", lineno, offset + 1)
    if header is None:
        raise exceptions.DSLSyntaxError("missing 'algebra' header", 1, 1)
    return header, field, tuple(generators), relations, tuple(notes)


def parse(text: str, field: Optional[FieldSpec] = None) -> Presentation:
    """Parse the input language into a validated presentation.

    A ``filtered algebra`` header accepts inhomogeneous relations and
    returns their homogenization.  ``field`` overrides the header's field.
    """
    header, field, generators, relations, notes = _parse_parts(text, field)
    if header.group("filtered"):
        return homogenize(
            FilteredPresentation(
                field, generators, tuple(r for _, _, r in relations), header.group("label")
            )
        )
    weights = tuple(g.degree for g in generators)
    for lineno, body, element in relations:
        degrees = element.degrees(weights)
        if len(degrees) > 1 or degrees == [0]:
            raise exceptions.InhomogeneousRelationError(body, lineno, degrees)
    return Presentation(
        field, generators, tuple(r for _, _, r in relations), header.group("label"), notes
    )


def parse_filtered(text: str, field: Optional[FieldSpec] = None) -> FilteredPresentation:
    header, field, generators, relations, _ = _parse_parts(text, field)
    return FilteredPresentation(
        field, generators, tuple(r for _, _, r in relations), header.group("label")
    )


def to_dsl(p: Presentation) -> str:
    lines = [
        f"algebra {p.label} over {p.field}",
        "deg " + ", ".join(f"{g.name}={g.degree}" for g in p.generators),
    ]
    lines.extend(f"rel {p.format(r)}" for r in p.relations)
    lines.extend(f"note {note}" for note in p.notes)
    return "\n".join(lines) + "\n"


# ----- constructions --------------------------------------------------------


def opposite(p: Presentation) -> Presentation:
    return replace(
        p,
        relations=tuple(r.reverse_words() for r in p.relations),
        label=f"{p.label}-op",
        notes=(),
    )


def enveloping(p: Presentation) -> Presentation:
    """A ⊗ A°: left copy, right copy (suffix ``_op``) and commutators."""
    n = len(p.generators)
    right = tuple(GeneratorInfo(g.name + RIGHT_SUFFIX, g.degree) for g in p.generators)
    shift = list(range(n, 2 * n))
    relations = list(p.relations)
    relations.extend(r.reverse_words().relabel(shift) for r in p.relations)
    f = p.field
    for i in range(n):
        for j in range(n):
            relations.append(
                FreeElement({(i, n + j): 1, (n + j, i): -1}, f)
            )
    return Presentation(f, p.generators + right, tuple(relations), f"{p.label}-e")


def _default_names(n: int) -> List[str]:
    return list("xyzw"[:n]) if n <= 4 else [f"x{i}" for i in range(1, n + 1)]


def skew_polynomial(
    n: int,
    params: Union[Scalar, Mapping[Tuple[int, int], Scalar]] = 1,
    field: Optional[FieldSpec] = None,
    label: Optional[str] = None,
) -> Presentation:
    """k_{p_ij}[x_1..x_n]: relations x_j x_i = p_ij x_i x_j for i < j."""
    if n < 1:
        raise exceptions.InputError("a skew polynomial ring needs at least one variable")
    field = field or FieldSpec.prime()
    relations = []
    for i in range(n):
        for j in range(i + 1, n):
            value = params.get((i, j), 1) if isinstance(params, Mapping) else params
            value = field.coerce(value)
            if not value:
                raise exceptions.ZeroParameterError(f"p_{i + 1}{j + 1}")
            relations.append(FreeElement({(j, i): 1, (i, j): -value}, field))
    generators = tuple(GeneratorInfo(name) for name in _default_names(n))
    return Presentation(field, generators, tuple(relations), label or f"skew-{n}")


def ore_extension(
    p: Presentation, alpha: Mapping[str, FreeElement], name: str = "t"
) -> Presentation:
    """p[t; alpha]: one new degree-1 generator with t·x = alpha(x)·t.

    alpha is checked to preserve degrees and to send every relation into the
    ideal; invertibility is not checked.
    """
    from .groebner import complete, normal_form

    if name in p.names:
        raise exceptions.InputError(f"generator name '{name}' is already taken")
    weights = p.weights
    images = []
    for g in p.generators:
        image = alpha.get(g.name, p.gen(g.name))
        if image and image.degrees(weights) != [g.degree]:
            raise exceptions.EndomorphismError(
                f"{g.name} ↦ {p.format(image)} does not preserve degree {g.degree}"
            )
        images.append(image)
    if p.relations:
        rs = complete(p, p.max_relation_degree)
        for r in p.relations:
            if normal_form(rs, substitute(r, images)):
                raise exceptions.EndomorphismError(f"relation {p.format(r)} is not preserved")
    n = len(p.generators)
    f = p.field
    t = FreeElement.monomial((n,), f)
    relations = list(p.relations)
    for i, image in enumerate(images):
        relations.append(multiply(t, FreeElement.monomial((i,), f)) - multiply(image, t))
    logger.info("ore extension of %s: alpha checked as an endomorphism only", p.label)
    return Presentation(
        f,
        p.generators + (GeneratorInfo(name, 1),),
        tuple(relations),
        f"{p.label}-ore-{name}",
        p.notes + (f"{name}: alpha endomorphism-checked only (invertibility not checked)",),
    )


def homogenize(fp: FilteredPresentation, name: str = "t") -> Presentation:
    """Rees ring presentation: central ``t`` first, relations padded with t."""
    if name in fp.names:
        raise exceptions.InputError(f"generator name '{name}' is already taken")
    f = fp.field
    shift = [i + 1 for i in range(len(fp.generators))]
    weights = (1,) + fp.weights
    t = FreeElement.monomial((0,), f)
    relations = []
    for r in fp.relations:
        r = r.relabel(shift)
        parts = r.homogeneous_parts(weights)
        top = max(parts)
        total = FreeElement.zero(f)
        for d, part in parts.items():
            total = total + multiply(part, power(t, top - d))
        relations.append(total)
    for i in range(1, len(weights)):
        relations.append(FreeElement({(0, i): 1, (i, 0): -1}, f))
    return Presentation(
        f,
        (GeneratorInfo(name, 1),) + fp.generators,
        tuple(relations),
        f"{fp.label}-rees",
    )


def dehomogenize(p: Presentation, name: str = "t") -> FilteredPresentation:
    """Set the homogenizing generator to 1 and drop its centrality relations."""
    k = p.index(name)
    f = p.field
    keep = [i for i in range(len(p.generators)) if i != k]
    position = {old: new for new, old in enumerate(keep)}
    images = []
    for i in range(len(p.generators)):
        if i == k:
            images.append(FreeElement.one(f))
        else:
            images.append(FreeElement.monomial((position[i],), f))
    relations = []
    for r in p.relations:
        image = substitute(r, images)
        if image:
            relations.append(image)
    return FilteredPresentation(
        f, tuple(p.generators[i] for i in keep), tuple(relations), p.label
    )


def associated_graded(fp: FilteredPresentation) -> Presentation:
    """Keep the top-degree part of every relation."""
    weights = fp.weights
    relations = []
    for r in fp.relations:
        parts = r.homogeneous_parts(weights)
        relations.append(parts[max(parts)])
    return Presentation(fp.field, fp.generators, tuple(relations), f"{fp.label}-gr")


# ----- the nilpotent group example ----------------------------------------

# Elements a^i b^j c^m of <a, b, c | ab = ba, ac = ca, bc = cba>.
GroupElement = Tuple[int, int, int]

SUBALGEBRA_GENERATORS: Tuple[Tuple[str, GroupElement], ...] = (
    ("x", (0, 0, 1)),  # c
    ("y", (1, 0, 1)),  # ac
    ("z", (0, 1, 1)),  # bc
    ("t", (1, 1, 1)),  # abc
)


def group_multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    # a is central and c^m b^l = b^l a^(-ml) c^m
    i, j, m = g
    k, l, n = h
    return (i + k - m * l, j + l, m + n)


def kg_multiply(u: Mapping[GroupElement, Scalar], v: Mapping[GroupElement, Scalar], field: FieldSpec) -> Dict[GroupElement, Scalar]:
    out: Dict[GroupElement, Scalar] = {}
    for g, cg in u.items():
        for h, ch in v.items():
            gh = group_multiply(g, h)
            out[gh] = field.coerce(out.get(gh, 0) + cg * ch)
    return {g: c for g, c in out.items() if c}


@dataclass(frozen=True)
class OracleResult:
    relations: Dict[int, Tuple[FreeElement, ...]]
    image_dims: Dict[int, int]


def group_algebra_oracle(
    degree_bound: int, field: Optional[FieldSpec] = None, kernel_upto: Optional[int] = None
) -> OracleResult:
    """Evaluate words in x, y, z, t into kG degree by degree.

    Returns the kernel of the evaluation map (the relations of the
    subalgebra) for degrees up to ``kernel_upto`` and the image dimension
    ``dim A_d`` for every degree up to ``degree_bound``.
    """
    if degree_bound < 1:
        raise exceptions.InputError("the oracle needs degree_bound >= 1")
    field = field or FieldSpec.prime()
    if kernel_upto is None:
        kernel_upto = degree_bound
    generators = [{g: field.coerce(1)} for _, g in SUBALGEBRA_GENERATORS]
    level: Dict[Word, Dict[GroupElement, Scalar]] = {EMPTY: {(0, 0, 0): field.coerce(1)}}
    relations: Dict[int, Tuple[FreeElement, ...]] = {}
    image_dims: Dict[int, int] = {}
    for d in range(1, degree_bound + 1):
        # deglex order: extend every word of degree d-1 on the right, then sort
        level = {
            word + (a,): kg_multiply(image, generators[a], field)
            for word, image in level.items()
            for a in range(len(generators))
        }
        words = sorted(level)
        rows: Dict[GroupElement, Dict[int, Scalar]] = {}
        for col, word in enumerate(words):
            for g, c in level[word].items():
                rows.setdefault(g, {})[col] = c
        matrix = SparseMatrix.from_rows(list(rows.values()), len(words), field)
        if d <= kernel_upto:
            kernel = kernel_vectors(matrix)
            relations[d] = tuple(
                FreeElement({words[c]: v for c, v in vector.items()}, field) for vector in kernel
            )
            image_dims[d] = len(words) - len(kernel)
        else:
            image_dims[d] = rank(matrix)
        logger.debug("oracle degree %d: %d words, image dimension %d", d, len(words), image_dims[d])
    return OracleResult(relations, image_dims)


def smith_zhang_from_oracle(field: Optional[FieldSpec] = None) -> Presentation:
    """The quadratic presentation read off the degree-2 kernel."""
    field = field or FieldSpec.prime()
    oracle = group_algebra_oracle(2, field)
    generators = tuple(GeneratorInfo(name) for name, _ in SUBALGEBRA_GENERATORS)
    return Presentation(field, generators, oracle.relations[2], "smith-zhang")


# ----- builtin corpus -----------------------------------------------------

BUILTIN_NAMES = (
    "polynomial-N",
    "quantum-plane-Q",
    "skew-N-Q",
    "free-N",
    "weyl-rees",
    "weyl-graded",
    "smith-zhang",
    "enveloping-<builtin>",
)

WEYL_TEXT = """\
filtered algebra weyl over Q
deg x=1, y=1
rel y*x - x*y - 1
"""


def _read_corpus(filename: str) -> str:
    with open(os.path.join(CORPUS_DIR, filename)) as handle:
        return handle.read()


def builtin(name: str, field: Optional[FieldSpec] = None) -> Presentation:
    field = field or FieldSpec.prime()
    if name.startswith("enveloping-"):
        return enveloping(builtin(name[len("enveloping-"):], field))
    match = re.fullmatch(r"polynomial-(\d+)", name)
    if match and int(match.group(1)) >= 1:
        return skew_polynomial(int(match.group(1)), 1, field, name)
    match = re.fullmatch(r"free-(\d+)", name)
    if match and int(match.group(1)) >= 1:
        n = int(match.group(1))
        return Presentation(field, tuple(GeneratorInfo(x) for x in _default_names(n)), (), name)
    match = re.fullmatch(r"quantum-plane-(-?\d+(?:/\d+)?)", name)
    if match:
        return skew_polynomial(2, Fraction(match.group(1)), field, name)
    match = re.fullmatch(r"skew-(\d+)-(-?\d+(?:/\d+)?)", name)
    if match and int(match.group(1)) >= 1:
        return skew_polynomial(int(match.group(1)), Fraction(match.group(2)), field, name)
    if name == "weyl-rees":
        return replace(parse(WEYL_TEXT, field), label=name)
    if name == "weyl-graded":
        return replace(associated_graded(parse_filtered(WEYL_TEXT, field)), label=name)
    if name == "smith-zhang":
        return parse(_read_corpus("smith-zhang.alg"), field)
    raise exceptions.UnknownBuiltinError(name, BUILTIN_NAMES)
