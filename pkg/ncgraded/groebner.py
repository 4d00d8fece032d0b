"""Degree-truncated noncommutative Gröbner bases.

Ambiguities are resolved degree by degree up to a bound; every rewrite
system remembers the degree below which it is certified complete.
"""

import logging
from collections import Counter, namedtuple
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from . import exceptions
from .exactla import FieldSpec, RowSpace, Scalar
from .freealg import EMPTY, FreeElement, Word, format_element, word_degree, word_key
from .presentation import Presentation

logger = logging.getLogger(__name__)


class RewriteRule(object):
    """``lead -> tail`` with a monic lead larger than every word of the tail."""

    __slots__ = ("lead", "tail", "degree")

    def __init__(self, lead: Word, tail: FreeElement, degree: int):
        self.lead = lead
        self.tail = tail
        self.degree = degree

    def element(self) -> FreeElement:
        return FreeElement.monomial(self.lead, self.tail.field) - self.tail

    def __eq__(self, other):
        if not isinstance(other, RewriteRule):
            return NotImplemented
        return self.lead == other.lead and self.tail == other.tail

    def __hash__(self):
        return hash((self.lead, self.tail))

    def __repr__(self):
        return f"RewriteRule({self.lead!r} -> {self.tail!r})"


Overlap = namedtuple("Overlap", ["word", "degree", "left", "right", "s_element"])


class RewriteSystem(object):
    """Inter-reduced rules plus the certificate ``complete_below``.

    Normal forms are memoised per word; the cache never changes the
    answer, only the cost of asking twice.
    """

    def __init__(self, presentation: Presentation, degree_bound: int):
        self.presentation = presentation
        self.field: FieldSpec = presentation.field
        self.weights: Tuple[int, ...] = presentation.weights
        self.degree_bound = degree_bound
        self.complete_below = 0
        self._by_lead: Dict[Word, RewriteRule] = {}
        self._lead_lengths: List[int] = []
        self._append_cache: Dict[Word, Dict[Word, Scalar]] = {}
        self._word_cache: Dict[Word, Dict[Word, Scalar]] = {}
        self._normal_words: Dict[int, List[Word]] = {0: [EMPTY]}
        self._closed: Optional[bool] = None

    @property
    def rules(self) -> Tuple[RewriteRule, ...]:
        return tuple(sorted(self._by_lead.values(), key=lambda r: word_key(r.lead, self.weights)))

    @property
    def leads(self) -> Tuple[Word, ...]:
        return tuple(r.lead for r in self.rules)

    def __len__(self):
        return len(self._by_lead)

    def rule_for(self, lead: Word) -> Optional[RewriteRule]:
        return self._by_lead.get(lead)

    def _extend(self, rules: Sequence[RewriteRule], degree: int):
        for rule in rules:
            self._by_lead[rule.lead] = rule
        self._lead_lengths = sorted({len(lead) for lead in self._by_lead})
        weights = self.weights
        self._append_cache = {
            w: nf for w, nf in self._append_cache.items() if word_degree(w, weights) < degree
        }
        self._word_cache = {
            w: nf for w, nf in self._word_cache.items() if word_degree(w, weights) < degree
        }
        self._normal_words = {d: ws for d, ws in self._normal_words.items() if d < degree}
        self._closed = None

    # ----- reduction ------------------------------------------------------

    def _suffix_rule(self, word: Word) -> Optional[RewriteRule]:
        n = len(word)
        for length in self._lead_lengths:
            if length > n:
                break
            rule = self._by_lead.get(word[n - length:])
            if rule is not None:
                return rule
        return None

    def _append(self, normal: Word, letter: int) -> Dict[Word, Scalar]:
        """NF(normal · letter); only a suffix can be a leading word."""
        word = normal + (letter,)
        hit = self._append_cache.get(word)
        if hit is not None:
            return hit
        rule = self._suffix_rule(word)
        if rule is None:
            result = {word: self.field.coerce(1)}
        else:
            prefix = word[: len(word) - len(rule.lead)]
            result: Dict[Word, Scalar] = {}
            for tail_word, coeff in rule.tail.terms.items():
                _accumulate(result, self._extend_normal(prefix, tail_word), coeff, self.field)
        self._append_cache[word] = result
        return result

    def _extend_normal(self, normal: Word, letters: Word) -> Dict[Word, Scalar]:
        current: Dict[Word, Scalar] = {normal: self.field.coerce(1)}
        for letter in letters:
            step: Dict[Word, Scalar] = {}
            for word, coeff in current.items():
                _accumulate(step, self._append(word, letter), coeff, self.field)
            current = step
            if not current:
                break
        return current

    def reduce_word(self, word: Word) -> Dict[Word, Scalar]:
        hit = self._word_cache.get(word)
        if hit is None:
            hit = self._extend_normal(EMPTY, word)
            self._word_cache[word] = hit
        return hit

    def reduce_terms(self, terms: Mapping[Word, Scalar]) -> Dict[Word, Scalar]:
        out: Dict[Word, Scalar] = {}
        for word, coeff in terms.items():
            _accumulate(out, self.reduce_word(word), coeff, self.field)
        return out

    def reduce(self, e: FreeElement) -> FreeElement:
        return FreeElement(self.reduce_terms(e.terms), self.field)

    def is_normal(self, word: Word) -> bool:
        n = len(word)
        for start in range(n):
            for length in self._lead_lengths:
                if start + length > n:
                    break
                if word[start : start + length] in self._by_lead:
                    return False
        return True

    def words_of_degree(self, d: int) -> List[Word]:
        """Normal words of degree ``d`` in increasing deglex order, uncertified."""
        if d < 0:
            return []
        cached = self._normal_words.get(d)
        if cached is not None:
            return cached
        out = []
        for letter, w in enumerate(self.weights):
            for prefix in self.words_of_degree(d - w) if w <= d else ():
                word = prefix + (letter,)
                if self._suffix_rule(word) is None:
                    out.append(word)
        # letters are appended last, so re-sort into deglex order
        out.sort()
        self._normal_words[d] = out
        return out

    def describe(self, rule: RewriteRule) -> str:
        names = self.presentation.names
        lead = format_element(FreeElement.monomial(rule.lead, self.field), names, self.weights)
        return f"{lead} -> {format_element(rule.tail, names, self.weights)}"


def _accumulate(target: Dict[Word, Scalar], source: Mapping[Word, Scalar], scale: Scalar, field: FieldSpec):
    for word, coeff in source.items():
        value = field.coerce(target.get(word, 0) + scale * coeff)
        if value:
            target[word] = value
        else:
            target.pop(word, None)


def _pair_overlaps(left: RewriteRule, right: RewriteRule, weights) -> List[Overlap]:
    a, b = left.lead, right.lead
    found = []
    for k in range(1, min(len(a), len(b))):
        if a[-k:] == b[:k]:
            word = a + b[k:]
            field = left.tail.field
            via_left = FreeElement({t + b[k:]: c for t, c in left.tail.terms.items()}, field)
            via_right = FreeElement({a[:-k] + t: c for t, c in right.tail.terms.items()}, field)
            found.append(Overlap(word, word_degree(word, weights), left, right, via_left - via_right))
    return found


def _rules_from_span(candidates: Sequence[Mapping[Word, Scalar]], degree: int, weights, field: FieldSpec) -> List[RewriteRule]:
    words = sorted({w for c in candidates for w in c}, key=lambda w: word_key(w, weights), reverse=True)
    column = {w: i for i, w in enumerate(words)}
    space = RowSpace(field)
    for c in candidates:
        space.add({column[w]: v for w, v in c.items()})
    rules = []
    for pivot, row in space.reduced_rows():
        tail = FreeElement({words[j]: -v for j, v in row.items() if j != pivot}, field)
        rules.append(RewriteRule(words[pivot], tail, degree))
    return rules


def complete(p: Presentation, bound: int) -> RewriteSystem:
    """Resolve every ambiguity of degree at most ``bound``."""
    maxdeg = p.max_relation_degree
    if bound < maxdeg:
        raise exceptions.BoundTooSmallError(bound, maxdeg)
    weights = p.weights
    rs = RewriteSystem(p, bound)
    relations: Dict[int, List[FreeElement]] = {}
    for r in p.relations:
        relations.setdefault(r.degree(weights), []).append(r)
    pending: Dict[int, List[Overlap]] = {}
    for d in range(1, bound + 1):
        overlaps_here = sorted(pending.pop(d, []), key=lambda o: word_key(o.word, weights))
        candidates = []
        for element in relations.get(d, []):
            candidates.append(rs.reduce_terms(element.terms))
        for overlap in overlaps_here:
            candidates.append(rs.reduce_terms(overlap.s_element.terms))
        candidates = [c for c in candidates if c]
        new_rules = _rules_from_span(candidates, d, weights, p.field) if candidates else []
        if new_rules:
            existing = list(rs._by_lead.values())
            rs._extend(new_rules, d)
            for index, new in enumerate(new_rules):
                for other in existing + new_rules[index:]:
                    found = _pair_overlaps(new, other, weights)
                    if other is not new:
                        found += _pair_overlaps(other, new, weights)
                    for overlap in found:
                        if overlap.degree <= bound:
                            pending.setdefault(overlap.degree, []).append(overlap)
        rs.complete_below = d
        logger.debug(
            "degree %d: %d ambiguities, %d new rules (%d total)",
            d,
            len(overlaps_here),
            len(new_rules),
            len(rs),
        )
    logger.info("completed %s to degree %d with %d rules", p.label, bound, len(rs))
    return rs


def normal_form(rs: RewriteSystem, e: FreeElement, strict: bool = True) -> FreeElement:
    """Reduce ``e`` by the rules of ``rs``.

    Above ``complete_below`` the result is not certified: this raises
    ``UncertifiedDegreeError`` unless ``strict`` is off, in which case the
    reduction is returned with a warning.
    """
    degree = e.degree(rs.weights)
    if degree is not None and degree > rs.complete_below:
        if strict:
            raise exceptions.UncertifiedDegreeError(degree, rs.complete_below)
        logger.warning(
            "normal form in degree %d is uncertified (complete below %d)", degree, rs.complete_below
        )
    return rs.reduce(e)


def normal_words(rs: RewriteSystem, d: int) -> List[Word]:
    if d > rs.complete_below:
        raise exceptions.UncertifiedDegreeError(d, rs.complete_below)
    return list(rs.words_of_degree(d))


def reduce_with(
    rs: RewriteSystem,
    e: FreeElement,
    choose: Optional[Callable[[List[Tuple[Word, int, RewriteRule]]], Tuple[Word, int, RewriteRule]]] = None,
) -> FreeElement:
    """Rewrite one occurrence at a time, letting ``choose`` pick which.

    Any strategy terminates because the order is admissible; below the
    certified degree every strategy ends at the same normal form.
    """
    f = rs.field
    terms = dict(e.terms)
    lengths = rs._lead_lengths
    while True:
        sites = []
        for word in sorted(terms, key=lambda w: word_key(w, rs.weights)):
            for start in range(len(word)):
                for length in lengths:
                    if start + length > len(word):
                        break
                    rule = rs._by_lead.get(word[start : start + length])
                    if rule is not None:
                        sites.append((word, start, rule))
        if not sites:
            return FreeElement(terms, f)
        word, start, rule = choose(sites) if choose else sites[0]
        coeff = terms.pop(word)
        prefix, suffix = word[:start], word[start + len(rule.lead):]
        _accumulate(terms, {prefix + t + suffix: c for t, c in rule.tail.terms.items()}, coeff, f)


def overlaps(rs: RewriteSystem) -> List[Overlap]:
    rules = rs.rules
    found = []
    for left in rules:
        for right in rules:
            found.extend(_pair_overlaps(left, right, rs.weights))
    found.sort(key=lambda o: word_key(o.word, rs.weights))
    return found


def is_closed(rs: RewriteSystem) -> bool:
    """True when every ambiguity of the final rules resolves.

    Ambiguities above ``complete_below`` are reduced with the rules at hand;
    when all of them vanish the rules form a Gröbner basis in every degree.
    """
    if rs._closed is None:
        closed = True
        for overlap in overlaps(rs):
            if overlap.degree <= rs.complete_below:
                continue
            if rs.reduce_terms(overlap.s_element.terms):
                logger.debug("unresolved ambiguity in degree %d", overlap.degree)
                closed = False
                break
        rs._closed = closed
    return rs._closed


def rules_per_degree(rs: RewriteSystem) -> Dict[int, int]:
    return dict(sorted(Counter(rule.degree for rule in rs.rules).items()))


def is_zero_in_algebra(rs: RewriteSystem, e: FreeElement) -> bool:
    return not normal_form(rs, e)
