"""Minimal graded free resolutions, Betti tables and their certificates.

Resolutions are built degree by degree with exact linear algebra over
normal-word bases.  A stage's generators in degree ``j`` are the kernel
vectors of the previous differential that are independent modulo the image
of the generators already chosen.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from . import exceptions
from .exactla import RowSpace, Scalar, SparseMatrix, kernel_vectors
from .freealg import FreeElement, Word, multiply, word_degree
from .groebner import RewriteSystem, is_closed
from .hilbert import GradedDims

logger = logging.getLogger(__name__)

ANICK = "anick-chains"
PRESENTATION = "presentation"
ONE_SIDED = "one-sided-resolution"
UNCERTIFIED = "none"

# how far past the requested degree a closed system may be resolved again
EXTENSION_FACTOR = 2

# (generator index, normal word) spans a free module in one degree
BasisElement = Tuple[int, Word]
# (degree bound, certificate); None means nothing bounds the stage
StageBound = Tuple[Optional[int], str]


@dataclass(frozen=True)
class ResolutionStage:
    """Generators of one free module and the differential into the previous one.

    ``differential[g]`` maps a generator index ``h`` of the previous stage
    to the coefficient of ``e_h`` in the image of ``e_g``.
    ``potential_bound`` bounds the degree of every generator this stage can
    have at all; -1 means the stage is certainly zero and None that no
    certificate applies.
    """

    index: int
    generator_degrees: Tuple[int, ...]
    differential: Tuple[Mapping[int, FreeElement], ...]
    degree_bound: int
    potential_bound: Optional[int] = None
    certificate: str = UNCERTIFIED
    homological_bound: int = 0

    @property
    def rank(self) -> int:
        return len(self.generator_degrees)

    def degree_counts(self) -> Dict[int, int]:
        return dict(sorted(Counter(self.generator_degrees).items()))

    @property
    def complete(self) -> bool:
        return self.potential_bound is not None and self.potential_bound <= self.degree_bound


class _Resolver(object):
    def __init__(self, rs: RewriteSystem, dbound: int):
        self.rs = rs
        self.field = rs.field
        self.dbound = dbound
        self.degrees: List[List[int]] = []
        self.differentials: List[List[Dict[int, FreeElement]]] = []
        self._bases: Dict[Tuple[int, int], Tuple[List[BasisElement], Dict[BasisElement, int]]] = {}
        self._images: Dict[Tuple[int, int, Word], Dict[BasisElement, Scalar]] = {}

    def basis(self, i: int, j: int):
        key = (i, j)
        cached = self._bases.get(key)
        if cached is None:
            elements = [
                (g, w)
                for g, s in enumerate(self.degrees[i])
                for w in self.rs.words_of_degree(j - s)
            ]
            cached = elements, {e: n for n, e in enumerate(elements)}
            self._bases[key] = cached
        return cached

    def image(self, i: int, g: int, w: Word) -> Dict[BasisElement, Scalar]:
        """NF(w · d_i(e_g)) keyed by basis elements of stage i - 1."""
        key = (i, g, w)
        cached = self._images.get(key)
        if cached is None:
            cached = {}
            for h, coeff in self.differentials[i][g].items():
                product = self.rs.reduce_terms({w + u: c for u, c in coeff.terms.items()})
                for word, c in product.items():
                    cached[(h, word)] = c
            self._images[key] = cached
        return cached

    def image_vector(self, i: int, g: int, w: Word, j: int) -> Dict[int, Scalar]:
        _, index = self.basis(i - 1, j)
        return {index[e]: c for e, c in self.image(i, g, w).items()}

    def kernel(self, i: int, j: int) -> List[Dict[int, Scalar]]:
        """Kernel of d_i on the degree-``j`` part of stage i."""
        elements, _ = self.basis(i, j)
        if not elements:
            return []
        rows = len(self.basis(i - 1, j)[0])
        columns = [self.image_vector(i, g, w, j) for g, w in elements]
        return kernel_vectors(SparseMatrix.from_columns(columns, rows, self.field))

    def to_differential(self, i: int, j: int, vector: Mapping[int, Scalar]) -> Dict[int, FreeElement]:
        elements, _ = self.basis(i - 1, j)
        grouped: Dict[int, Dict[Word, Scalar]] = {}
        for n, c in vector.items():
            h, word = elements[n]
            grouped.setdefault(h, {})[word] = c
        return {h: FreeElement(terms, self.field) for h, terms in sorted(grouped.items())}

    def build_stage(self, i: int, first_kernel) -> None:
        self.degrees.append([])
        self.differentials.append([])
        for j in range(self.dbound + 1):
            if i == 1:
                candidates = first_kernel(j)
            else:
                candidates = self.kernel(i - 1, j)
            if not candidates:
                continue
            space = RowSpace(self.field)
            for g, s in enumerate(self.degrees[i]):
                for w in self.rs.words_of_degree(j - s):
                    space.add(self.image_vector(i, g, w, j))
            added = 0
            for vector in candidates:
                if space.add(vector):
                    self.degrees[i].append(j)
                    self.differentials[i].append(self.to_differential(i, j, vector))
                    added += 1
            if added:
                logger.debug("stage %d degree %d: %d new generators", i, j, added)


def _check_bounds(rs: RewriteSystem, hbound: int, dbound: int):
    if hbound < 1:
        raise exceptions.InputError("the homological bound must be at least 1")
    if dbound > rs.complete_below:
        raise exceptions.UncertifiedDegreeError(dbound, rs.complete_below)


def _resolve(
    rs: RewriteSystem, module_relations: Sequence[FreeElement], hbound: int, dbound: int, checked: bool = True
):
    if checked:
        _check_bounds(rs, hbound, dbound)
    weights = rs.weights
    resolver = _Resolver(rs, dbound)
    resolver.degrees.append([0])
    resolver.differentials.append([{}])
    by_degree: Dict[int, List[FreeElement]] = {}
    for r in module_relations:
        if r:
            by_degree.setdefault(r.degree(weights), []).append(r)

    def first_kernel(j):
        _, index = resolver.basis(0, j)
        vectors = []
        for e, relations in sorted(by_degree.items()):
            for u in rs.words_of_degree(j - e):
                for r in relations:
                    nf = rs.reduce_terms(multiply(FreeElement.monomial(u, rs.field), r).terms)
                    if nf:
                        vectors.append({index[(0, w)]: c for w, c in nf.items()})
        return vectors

    for i in range(1, hbound + 1):
        resolver.build_stage(i, first_kernel)
        if not resolver.degrees[i]:
            break
    return resolver


def _stages(resolver: _Resolver, hbound: int, bounds: Sequence[StageBound]) -> List[ResolutionStage]:
    return [
        ResolutionStage(
            i,
            tuple(resolver.degrees[i]),
            tuple(resolver.differentials[i]) if i else (),
            resolver.dbound,
            bounds[i][0],
            bounds[i][1],
            hbound,
        )
        for i in range(len(resolver.degrees))
    ]


def _tighten(known: Sequence[StageBound], extra: Sequence[StageBound]) -> List[StageBound]:
    """Stage by stage, the smaller of two bounds; None is no bound at all."""
    out = []
    for i in range(max(len(known), len(extra))):
        a = known[i] if i < len(known) else (None, UNCERTIFIED)
        b = extra[i] if i < len(extra) else (None, UNCERTIFIED)
        if a[0] is None or (b[0] is not None and b[0] < a[0]):
            a = b
        out.append(a)
    return out


def _padded(bounds: Sequence[StageBound], length: int) -> List[StageBound]:
    return list(bounds[:length]) + [(None, UNCERTIFIED)] * (length - len(bounds))


def _presentation_bounds(rs: RewriteSystem) -> List[StageBound]:
    """Tor_0, Tor_1 and Tor_2 of k live below the presentation's degrees."""
    p = rs.presentation
    relation_bound = p.max_relation_degree if p.relations else -1
    return [(0, PRESENTATION), (max(rs.weights, default=-1), PRESENTATION), (relation_bound, PRESENTATION)]


def _chain_bounds(rs: RewriteSystem, length: int) -> List[StageBound]:
    if length < 1 or not is_closed(rs):
        return []
    chains = chain_degree_bounds(rs, length - 1)
    return [(max(counts) if counts else -1, ANICK) for counts in chains]


def _extension(resolver: _Resolver, bounds: Sequence[StageBound]) -> Optional[int]:
    """Degree to resolve again to when that certifies the first empty stage."""
    last = len(resolver.degrees) - 1
    if last < 1 or resolver.degrees[last]:
        return None
    bound = bounds[last][0]
    dbound = resolver.dbound
    if bound is None or not dbound < bound <= EXTENSION_FACTOR * dbound:
        return None
    # above complete_below only a closed system has the right normal words
    if not is_closed(resolver.rs):
        return None
    return bound


def _certified_resolution(
    rs: RewriteSystem,
    module_relations: Sequence[FreeElement],
    hbound: int,
    dbound: int,
    certify: Callable[[int], List[StageBound]],
    extend: bool,
) -> List[ResolutionStage]:
    resolver = _resolve(rs, module_relations, hbound, dbound)
    bounds = _padded(certify(len(resolver.degrees)), len(resolver.degrees))
    target = _extension(resolver, bounds) if extend else None
    if target is not None:
        logger.info(
            "stage %d may have generators up to degree %d; resolving again to degree %d",
            len(resolver.degrees) - 1,
            target,
            target,
        )
        resolver = _resolve(rs, module_relations, hbound, target, checked=False)
        bounds = _padded(certify(len(resolver.degrees)), len(resolver.degrees))
    logger.info(
        "resolved over %s: stage ranks %s, bounds %s",
        rs.presentation.label,
        [len(d) for d in resolver.degrees],
        [b for b, _ in bounds],
    )
    return _stages(resolver, hbound, bounds)


def _ufnarovski_graph(rs: RewriteSystem):
    leads = set(rs.leads)
    lengths = sorted({len(lead) for lead in leads})
    letters = [(a,) for a in range(len(rs.weights))]
    suffixes = sorted({lead[k:] for lead in leads for k in range(1, len(lead))})

    def contains_lead(word):
        for start in range(len(word)):
            for length in lengths:
                if start + length > len(word):
                    break
                if word[start : start + length] in leads:
                    return True
        return False

    edges: Dict[Word, List[Word]] = {}
    for u in set(letters) | set(suffixes):
        targets = []
        for v in suffixes:
            word = u + v
            if any(word[len(word) - n:] in leads for n in lengths if n <= len(word)) and not contains_lead(word[:-1]):
                targets.append(v)
        edges[u] = targets
    return letters, edges


def chain_degree_bounds(rs: RewriteSystem, hmax: int) -> List[Dict[int, int]]:
    """Anick chain counts by degree for stages 0..hmax.

    For a closed rewrite system these bound the Betti numbers of k from
    above, stage by stage and degree by degree.
    """
    weights = rs.weights
    letters, edges = _ufnarovski_graph(rs)
    out: List[Dict[int, int]] = [{0: 1}]
    if hmax < 1:
        return out
    frontier: Dict[Word, Counter] = {u: Counter({word_degree(u, weights): 1}) for u in letters}
    for _ in range(1, hmax + 1):
        total: Counter = Counter()
        for counts in frontier.values():
            total.update(counts)
        out.append(dict(sorted(total.items())))
        step: Dict[Word, Counter] = {}
        for u, counts in frontier.items():
            for v in edges.get(u, ()):
                w = word_degree(v, weights)
                target = step.setdefault(v, Counter())
                for d, n in counts.items():
                    target[d + w] += n
        frontier = step
    return out


def minimal_resolution(rs: RewriteSystem, hbound: int, dbound: int, extend: bool = True) -> List[ResolutionStage]:
    """Minimal free resolution of the trivial module up to (hbound, dbound).

    When the first empty stage is only certified a little above ``dbound``
    and ``rs`` is closed, the resolution is redone once to that degree.
    """
    generators = [FreeElement.monomial((a,), rs.field) for a in range(len(rs.weights))]

    def certify(length):
        return _tighten(_presentation_bounds(rs), _chain_bounds(rs, length))

    return _certified_resolution(rs, generators, hbound, dbound, certify, extend)


def cyclic_module_resolution(
    rs: RewriteSystem,
    module_relations: Sequence[FreeElement],
    hbound: int,
    dbound: int,
    stage_bounds: Sequence[StageBound] = (),
    extend: bool = True,
) -> List[ResolutionStage]:
    """Minimal free resolution of B / (B r_1 + ... + B r_m).

    Beyond stage 1 a stage is only certified by ``stage_bounds``.
    """
    weights = rs.weights
    for r in module_relations:
        if not r.is_homogeneous(weights):
            raise exceptions.InputError("module relations must be homogeneous")
    relation_bound = max((r.degree(weights) for r in module_relations if r), default=-1)
    own = [(0, PRESENTATION), (relation_bound, PRESENTATION)]

    def certify(length):
        return _tighten(own, stage_bounds)

    return _certified_resolution(rs, module_relations, hbound, dbound, certify, extend)


@dataclass(frozen=True)
class BettiTable:
    entries: Mapping[Tuple[int, int], int]
    certified_internal: int
    certified_homological: int
    potential_bounds: Tuple[Optional[int], ...] = ()
    certificates: Tuple[str, ...] = ()
    standard_graded: bool = True

    def __getitem__(self, key: Tuple[int, int]) -> int:
        return self.entries.get(key, 0)

    def stage(self, i: int) -> Dict[int, int]:
        return {j: n for (k, j), n in sorted(self.entries.items()) if k == i}

    @property
    def length(self) -> int:
        """Largest homological index with a nonzero entry."""
        return max((i for i, _ in self.entries), default=0)

    def totals(self) -> List[int]:
        return [sum(self.stage(i).values()) for i in range(self.length + 1)]

    def potential_bound(self, i: int) -> Optional[int]:
        return self.potential_bounds[i] if i < len(self.potential_bounds) else None

    def certificate(self, i: int) -> str:
        return self.certificates[i] if i < len(self.certificates) else UNCERTIFIED

    def grid(self) -> str:
        """Rows by j - i, columns by homological index."""
        if not self.entries:
            return ""
        shifts = sorted({j - i for i, j in self.entries})
        columns = range(self.length + 1)
        width = max(len(str(n)) for n in self.entries.values()) + 1
        lines = ["     " + "".join(str(i).rjust(width + 1) for i in columns)]
        for shift in range(shifts[0], shifts[-1] + 1):
            cells = []
            for i in columns:
                n = self[(i, i + shift)]
                cells.append(("-" if not n else str(n)).rjust(width + 1))
            lines.append(f"{shift:>3}: " + "".join(cells))
        return "\n".join(lines)

    def to_dict(self):
        return {
            "entries": [[i, j, n] for (i, j), n in sorted(self.entries.items())],
            "certified_internal": self.certified_internal,
            "certified_homological": self.certified_homological,
            "potential_bounds": list(self.potential_bounds),
            "certificates": list(self.certificates),
        }


def betti(stages: Sequence[ResolutionStage]) -> BettiTable:
    entries: Dict[Tuple[int, int], int] = {}
    for stage in stages:
        for j, n in stage.degree_counts().items():
            entries[(stage.index, j)] = n
    first = stages[0]
    standard = len(stages) < 2 or all(d == 1 for d in stages[1].generator_degrees)
    return BettiTable(
        entries,
        first.degree_bound,
        first.homological_bound,
        tuple(stage.potential_bound for stage in stages),
        tuple(stage.certificate for stage in stages),
        standard,
    )


@dataclass(frozen=True)
class GldimVerdict:
    value: Optional[int]
    lower_bound: int
    certified: bool
    certificate: str
    note: str = ""

    def __str__(self):
        if self.certified:
            return f"{self.value} ({self.certificate})"
        return f">= {self.lower_bound} (not certified)"

    def to_dict(self):
        return {
            "value": self.value,
            "lower_bound": self.lower_bound,
            "certified": self.certified,
            "certificate": self.certificate,
            "note": self.note,
        }


def gldim_upto(b: BettiTable) -> GldimVerdict:
    """Exact global dimension when the first empty stage is certified empty."""
    n = b.length
    first_empty = n + 1
    if first_empty >= len(b.potential_bounds):
        return GldimVerdict(None, n, False, UNCERTIFIED, f"stage {first_empty} not computed")
    bound = b.potential_bound(first_empty)
    if bound is None:
        return GldimVerdict(
            None, n, False, UNCERTIFIED, f"no degree bound for stage {first_empty} (rewrite system not closed)"
        )
    if bound <= b.certified_internal:
        return GldimVerdict(n, n, True, b.certificate(first_empty))
    return GldimVerdict(
        None,
        n,
        False,
        b.certificate(first_empty),
        f"stage {first_empty} could have generators up to degree {bound}",
    )


@dataclass(frozen=True)
class KoszulVerdict:
    status: str
    upto: Tuple[int, int]
    witness: Optional[Tuple[int, int]] = None
    identity_ok: Optional[bool] = None

    @property
    def koszul(self) -> bool:
        return self.status == "koszul"

    def __str__(self):
        if self.status == "koszul":
            return "Koszul up to ({}, {})".format(*self.upto)
        if self.status == "not-applicable":
            return "not applicable to Koszul property in standard form"
        if self.witness:
            return "not Koszul: Tor_{}(k,k) is nonzero in degree {}".format(*self.witness)
        return "not Koszul: the Koszul identity fails"

    def to_dict(self):
        return {
            "status": self.status,
            "upto": list(self.upto),
            "witness": list(self.witness) if self.witness else None,
            "identity_ok": self.identity_ok,
        }


def koszul_check(b: BettiTable, dims: Optional[GradedDims] = None) -> KoszulVerdict:
    upto = (b.certified_homological, b.certified_internal)
    if not b.standard_graded:
        return KoszulVerdict("not-applicable", upto)
    off_diagonal = sorted((i, j) for (i, j), n in b.entries.items() if n and i != j)
    if off_diagonal:
        return KoszulVerdict("not-koszul", upto, off_diagonal[0])
    identity_ok = None
    if dims is not None:
        gldim = gldim_upto(b)
        top = min(dims.certified_to, b.certified_internal if gldim.certified else b.certified_homological)
        identity_ok = True
        for d in range(top + 1):
            value = sum((-1) ** i * b[(i, i)] * dims[d - i] for i in range(d + 1))
            if value != (1 if d == 0 else 0):
                identity_ok = False
                break
    if identity_ok is False:
        return KoszulVerdict("not-koszul", upto, None, False)
    return KoszulVerdict("koszul", upto, None, identity_ok)


def differential_squares_to_zero(rs: RewriteSystem, stages: Sequence[ResolutionStage]) -> bool:
    """Check d_{i-1} ∘ d_i = 0 on every generator, exactly."""
    f = rs.field
    for stage in stages[2:]:
        previous = stages[stage.index - 1]
        for g, images in enumerate(stage.differential):
            total: Dict[Tuple[int, Word], Scalar] = {}
            for h, coeff in images.items():
                for h2, coeff2 in previous.differential[h].items():
                    product = rs.reduce_terms(multiply(coeff, coeff2).terms)
                    for word, c in product.items():
                        key = (h2, word)
                        value = f.coerce(total.get(key, 0) + c)
                        if value:
                            total[key] = value
                        else:
                            total.pop(key)
            if total:
                logger.warning("d^2 != 0 on generator %d of stage %d", g, stage.index)
                return False
    return True


def euler_characteristic_defects(
    stages: Sequence[ResolutionStage], dims: GradedDims, module_dims: Optional[Sequence[int]] = None
) -> List[int]:
    """Degrees where sum_i (-1)^i sum_s beta_{i,s} dim A_{j-s} differs from the module.

    Only degrees that every relevant stage reaches are tested.
    """
    last = stages[-1]
    top = min(dims.certified_to, last.degree_bound)
    if last.generator_degrees or not last.complete:
        top = min(top, len(stages) - 1)
    defects = []
    for j in range(top + 1):
        value = 0
        for stage in stages:
            for s in stage.generator_degrees:
                value += (-1) ** stage.index * dims[j - s]
        expected = (module_dims[j] if j < len(module_dims) else 0) if module_dims is not None else int(j == 0)
        if value != expected:
            defects.append(j)
    return defects
