"""Ext over A and over the enveloping algebra, and what they certify.

A resolution ``F`` of a cyclic module over ``B`` is dualized into ``B``:
``Hom_B(F_i, B)`` in internal degree ``j`` is spanned by the maps sending
a generator of degree ``s`` to a normal word of degree ``j + s``.  The
coboundary is ``(δφ)(e_g) = Σ_h c_{g,h} · φ(e_h)``, and ``B`` acts on the
right of every cochain, which is the action used to read off twists.
"""

import logging
from collections import namedtuple
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import exceptions
from .exactla import RowSpace, Scalar, SparseMatrix, kernel_vectors, rank, solve
from .freealg import FreeElement, Word, substitute
from .groebner import RewriteSystem, complete
from .hilbert import GradedDims
from .presentation import Presentation, enveloping
from .resolution import (
    ONE_SIDED,
    BettiTable,
    GldimVerdict,
    ResolutionStage,
    betti,
    cyclic_module_resolution,
    minimal_resolution,
)

logger = logging.getLogger(__name__)

OVER_A = "overA"
OVER_AE = "overAe"

GOLDIE_HYPOTHESIS = "A is a Goldie prime ring (an Ore domain), so that its quotient division ring exists; not machine-checked"
TRUNCATION_HYPOTHESIS = "vanishing outside the certified window is not claimed"


class DualComplex(object):
    """Cochains ``Hom_B(F_i, B)`` one internal degree at a time."""

    def __init__(self, rs: RewriteSystem, stages: Sequence[ResolutionStage]):
        self.rs = rs
        self.field = rs.field
        self.stages = list(stages)
        self._bases: Dict[Tuple[int, int], Tuple[List[Tuple[int, Word]], Dict[Tuple[int, Word], int]]] = {}
        self._deltas: Dict[Tuple[int, int], List[Dict[int, Scalar]]] = {}
        self._ranks: Dict[Tuple[int, int], int] = {}
        self._incoming: Dict[int, Dict[int, List[Tuple[int, FreeElement]]]] = {}

    def degrees(self, i: int) -> Tuple[int, ...]:
        if 0 <= i < len(self.stages):
            return self.stages[i].generator_degrees
        return ()

    def basis(self, i: int, j: int):
        key = (i, j)
        cached = self._bases.get(key)
        if cached is None:
            elements = [
                (g, w) for g, s in enumerate(self.degrees(i)) for w in self.rs.words_of_degree(j + s)
            ]
            cached = elements, {e: n for n, e in enumerate(elements)}
            self._bases[key] = cached
        return cached

    def _incoming_to(self, i: int) -> Dict[int, List[Tuple[int, FreeElement]]]:
        # generators of stage i + 1 whose differential involves e_h of stage i
        cached = self._incoming.get(i)
        if cached is None:
            cached = {}
            if i + 1 < len(self.stages):
                for g, images in enumerate(self.stages[i + 1].differential):
                    for h, coeff in images.items():
                        cached.setdefault(h, []).append((g, coeff))
            self._incoming[i] = cached
        return cached

    def delta(self, i: int, j: int) -> List[Dict[int, Scalar]]:
        """Images of the basis of Hom^i_j, as vectors over the basis of Hom^{i+1}_j."""
        key = (i, j)
        cached = self._deltas.get(key)
        if cached is not None:
            return cached
        elements, _ = self.basis(i, j)
        _, target = self.basis(i + 1, j)
        incoming = self._incoming_to(i)
        f = self.field
        cached = []
        for h, w in elements:
            vector: Dict[int, Scalar] = {}
            for g, coeff in incoming.get(h, ()):
                product = self.rs.reduce_terms({u + w: c for u, c in coeff.terms.items()})
                for word, c in product.items():
                    n = target[(g, word)]
                    value = f.coerce(vector.get(n, 0) + c)
                    if value:
                        vector[n] = value
                    else:
                        vector.pop(n)
            cached.append(vector)
        self._deltas[key] = cached
        return cached

    def rank(self, i: int, j: int) -> int:
        if i < 0:
            return 0
        key = (i, j)
        if key not in self._ranks:
            rows = len(self.basis(i + 1, j)[0])
            self._ranks[key] = rank(SparseMatrix.from_rows(self.delta(i, j), rows, self.field))
        return self._ranks[key]

    def hom_dim(self, i: int, j: int) -> int:
        return len(self.basis(i, j)[0])

    def dim(self, i: int, j: int) -> int:
        return self.hom_dim(i, j) - self.rank(i, j) - self.rank(i - 1, j)

    def cocycles(self, i: int, j: int) -> List[Dict[int, Scalar]]:
        columns = self.delta(i, j)
        if not columns:
            return []
        rows = len(self.basis(i + 1, j)[0])
        return kernel_vectors(SparseMatrix.from_columns(columns, rows, self.field))

    def coboundaries(self, i: int, j: int) -> List[Dict[int, Scalar]]:
        return self.delta(i - 1, j) if i > 0 else []

    def act(self, i: int, j: int, vector: Mapping[int, Scalar], element: FreeElement) -> Dict[int, Scalar]:
        """Right multiplication of the cochain ``vector`` by a homogeneous element."""
        degree = element.degree(self.rs.weights) or 0
        elements, _ = self.basis(i, j)
        _, target = self.basis(i, j + degree)
        f = self.field
        out: Dict[int, Scalar] = {}
        for n, c in vector.items():
            g, w = elements[n]
            product = self.rs.reduce_terms({w + u: cu for u, cu in element.terms.items()})
            for word, cp in product.items():
                m = target[(g, word)]
                value = f.coerce(out.get(m, 0) + c * cp)
                if value:
                    out[m] = value
                else:
                    out.pop(m)
        return out

    def stage_known(self, k: int) -> bool:
        """All generators of stage ``k`` are known (possibly none)."""
        if k < 0:
            return True
        if k < len(self.stages):
            return self.stages[k].complete
        return any(not s.generator_degrees and s.complete for s in self.stages)

    def top_degree(self) -> int:
        return max((max(s.generator_degrees) for s in self.stages if s.generator_degrees), default=0)


@dataclass(frozen=True)
class ExtTable:
    entries: Mapping[Tuple[int, int], int]
    window: Tuple[int, int]
    side: str
    certified: Mapping[Tuple[int, int], bool]
    complex: Optional[DualComplex] = dc_field(default=None, compare=False, repr=False)

    def __getitem__(self, key: Tuple[int, int]) -> int:
        return self.entries[key]

    def is_certified(self, i: int, j: int) -> bool:
        return self.certified.get((i, j), False)

    @property
    def indices(self) -> List[int]:
        return sorted({i for i, _ in self.entries})

    def nonzero(self, certified_only: bool = True) -> List[Tuple[int, int]]:
        return sorted(
            key
            for key, n in self.entries.items()
            if n and (self.certified.get(key, False) or not certified_only)
        )

    def row(self, i: int) -> Dict[int, int]:
        return {j: n for (k, j), n in sorted(self.entries.items()) if k == i}

    def grid(self) -> str:
        lo, hi = self.window
        width = max([len(str(n)) for n in self.entries.values()] + [len(str(lo)), len(str(hi))]) + 1
        lines = ["  j:" + "".join(str(j).rjust(width + 1) for j in range(lo, hi + 1))]
        for i in self.indices:
            cells = []
            for j in range(lo, hi + 1):
                n = self.entries.get((i, j))
                text = "." if n is None else str(n) + ("" if self.is_certified(i, j) else "?")
                cells.append(text.rjust(width + 1))
            lines.append(f"{i:>3}:" + "".join(cells))
        return "\n".join(lines)

    def to_dict(self):
        return {
            "side": self.side,
            "window": list(self.window),
            "entries": [
                [i, j, n, self.is_certified(i, j)] for (i, j), n in sorted(self.entries.items())
            ],
        }


def _ext_table(rs: RewriteSystem, stages: Sequence[ResolutionStage], window, side: str) -> ExtTable:
    complex_ = DualComplex(rs, stages)
    top = complex_.top_degree()
    if window is None:
        window = (-top, rs.complete_below - top)
    lo, hi = window
    if hi + top > rs.complete_below:
        raise exceptions.UncertifiedDegreeError(hi + top, rs.complete_below)
    entries: Dict[Tuple[int, int], int] = {}
    certified: Dict[Tuple[int, int], bool] = {}
    for i in range(len(stages)):
        known = all(complex_.stage_known(k) for k in (i - 1, i, i + 1))
        for j in range(lo, hi + 1):
            entries[(i, j)] = complex_.dim(i, j)
            certified[(i, j)] = known
    logger.info("%s Ext table in degrees %d..%d: nonzero at %s", side, lo, hi, sorted(k for k, n in entries.items() if n))
    return ExtTable(entries, (lo, hi), side, certified, complex_)


def ext_k_A(
    rs: RewriteSystem, stages: Sequence[ResolutionStage], window: Optional[Tuple[int, int]] = None
) -> ExtTable:
    """Ext^i_A(k, A) from a minimal resolution of k."""
    return _ext_table(rs, stages, window, OVER_A)


def hochschild_ext(
    env_rs: RewriteSystem, stages: Sequence[ResolutionStage], window: Optional[Tuple[int, int]] = None
) -> ExtTable:
    """Ext^i_{A^e}(A, A^e) from a resolution of the diagonal bimodule."""
    return _ext_table(env_rs, stages, window, OVER_AE)


def dual_euler_defects(t: ExtTable, dims: GradedDims) -> List[int]:
    """Degrees where the alternating Ext sum differs from the alternating cochain dims."""
    complex_ = t.complex
    defects = []
    lo, hi = t.window
    for j in range(lo, hi + 1):
        ext_sum = sum((-1) ** i * t.entries[(i, j)] for i in t.indices)
        hom_sum = sum(
            (-1) ** i * sum(dims[j + s] for s in complex_.degrees(i)) for i in t.indices
        )
        if ext_sum != hom_sum:
            defects.append(j)
    return defects


@dataclass(frozen=True)
class ASVerdict:
    status: str
    n: Optional[int] = None
    l: Optional[int] = None
    witness: Optional[Tuple[int, int]] = None
    witness_side: Optional[str] = None
    certified_bounds: Mapping[str, object] = dc_field(default_factory=dict)
    reason: str = ""

    @property
    def regular(self) -> bool:
        return self.status == "regular"

    def __str__(self):
        if self.status in ("regular", "gorenstein_conditions_hold"):
            return f"{self.status}({self.n}, {self.l})"
        if self.status == "fails":
            return "fails at Ext^{}_{} ({}): {}".format(self.witness[0], self.witness[1], self.witness_side, self.reason)
        return f"inconclusive: {self.reason}"

    def to_dict(self):
        return {
            "status": self.status,
            "n": self.n,
            "l": self.l,
            "witness": list(self.witness) if self.witness else None,
            "witness_side": self.witness_side,
            "certified_bounds": dict(self.certified_bounds),
            "reason": self.reason,
        }


_Pattern = namedtuple("_Pattern", ["status", "n", "l", "witness", "reason"])


def _gorenstein_pattern(t: ExtTable) -> _Pattern:
    nonzero = t.nonzero()
    if not nonzero:
        return _Pattern("inconclusive", None, None, None, "no certified nonzero Ext entry in the window")
    n = max(i for i, _ in nonzero)
    candidate = min((i, j) for i, j in nonzero if i == n)
    offenders = [key for key in nonzero if key != candidate]
    if t.entries[candidate] != 1:
        offenders.append(candidate)
    if offenders:
        witness = min(offenders)
        return _Pattern("fails", None, None, witness, f"Ext^{witness[0]} has dimension {t.entries[witness]} in degree {witness[1]}")
    return _Pattern("ok", n, -candidate[1], None, "")


def as_check(t_left: ExtTable, t_right: ExtTable, gldim: Optional[GldimVerdict] = None) -> ASVerdict:
    """Decide the Artin-Schelter pattern from the left and right Ext tables."""
    bounds = {"left_window": list(t_left.window), "right_window": list(t_right.window)}
    if gldim is not None:
        bounds["gldim"] = gldim.value if gldim.certified else None
    patterns = (("left", _gorenstein_pattern(t_left)), ("right", _gorenstein_pattern(t_right)))
    for side, pattern in patterns:
        if pattern.status == "fails":
            return ASVerdict("fails", witness=pattern.witness, witness_side=side, certified_bounds=bounds, reason=pattern.reason)
    for side, pattern in patterns:
        if pattern.status == "inconclusive":
            return ASVerdict("inconclusive", certified_bounds=bounds, reason=f"{side}: {pattern.reason}")
    left, right = patterns[0][1], patterns[1][1]
    if (left.n, left.l) != (right.n, right.l):
        return ASVerdict(
            "fails",
            witness=(right.n, -right.l),
            witness_side="right",
            certified_bounds=bounds,
            reason=f"left pattern ({left.n}, {left.l}) differs from right pattern ({right.n}, {right.l})",
        )
    if gldim is None or not gldim.certified:
        return ASVerdict("gorenstein_conditions_hold", left.n, left.l, certified_bounds=bounds, reason="global dimension not certified")
    if gldim.value != left.n:
        return ASVerdict(
            "inconclusive",
            certified_bounds=bounds,
            reason=f"global dimension {gldim.value} differs from the Ext index {left.n}",
        )
    return ASVerdict("regular", left.n, left.l, certified_bounds=bounds)


BimoduleResolution = namedtuple("BimoduleResolution", ["stages", "betti", "env_rs"])


def diagonal_module_relations(p: Presentation) -> List[FreeElement]:
    """x_i - x_i° in the enveloping algebra: A is A^e modulo these."""
    n = len(p.generators)
    return [FreeElement({(i,): 1, (n + i,): -1}, p.field) for i in range(n)]


def diagonal_bimodule_resolution(
    p: Presentation,
    hbound: int,
    dbound: int,
    env_rs: Optional[RewriteSystem] = None,
    one_sided: Optional[BettiTable] = None,
) -> BimoduleResolution:
    """Resolve A over A^e.

    Its Betti numbers are those of k over A, so the degree bounds of the
    one-sided table certify the bimodule stages.
    """
    if env_rs is None:
        env_rs = complete(enveloping(p), dbound)
    if one_sided is None:
        one_sided = betti(minimal_resolution(complete(p, dbound), hbound, dbound))
    stage_bounds = [(bound, ONE_SIDED) for bound in one_sided.potential_bounds]
    stages = cyclic_module_resolution(env_rs, diagonal_module_relations(p), hbound, dbound, stage_bounds)
    return BimoduleResolution(stages, betti(stages), env_rs)


def betti_agreement(one_sided: BettiTable, bimodule: BettiTable) -> List[Tuple[int, int]]:
    """Bidegrees inside both windows where the two Betti tables differ."""
    top_i = min(one_sided.certified_homological, bimodule.certified_homological)
    top_j = min(one_sided.certified_internal, bimodule.certified_internal)
    keys = set(one_sided.entries) | set(bimodule.entries)
    return sorted(
        (i, j) for i, j in keys if i <= top_i and j <= top_j and one_sided[(i, j)] != bimodule[(i, j)]
    )


@dataclass(frozen=True)
class RigidityVerdict:
    concentrated_at: Optional[int]
    graded_match: bool
    shift: Optional[int] = None
    twist_on_generators: Optional[Mapping[str, str]] = None
    twist_verified: Optional[bool] = None
    certified_bounds: Mapping[str, object] = dc_field(default_factory=dict)
    reason: str = ""

    @property
    def rigid(self) -> bool:
        return self.concentrated_at is not None and self.graded_match

    def __str__(self):
        if not self.rigid:
            return f"not rigid in window: {self.reason}"
        text = f"concentrated at {self.concentrated_at}, graded dims of A({-self.shift})"
        if self.twist_on_generators:
            twist = ", ".join(f"{g} -> {image}" for g, image in self.twist_on_generators.items())
            text += f"; twist {twist}"
            if self.twist_verified is not None:
                text += " (verified on relations)" if self.twist_verified else " (fails on relations)"
        return text

    def to_dict(self):
        return {
            "concentrated_at": self.concentrated_at,
            "graded_match": self.graded_match,
            "shift": self.shift,
            "twist_on_generators": dict(self.twist_on_generators) if self.twist_on_generators else None,
            "twist_verified": self.twist_verified,
            "certified_bounds": dict(self.certified_bounds),
            "reason": self.reason,
        }


def verify_twist(rs: RewriteSystem, images: Sequence[FreeElement]) -> bool:
    """Every defining relation is sent into the ideal."""
    for r in rs.presentation.relations:
        if rs.reduce(substitute(r, images)):
            return False
    return True


def extract_twist(t: ExtTable, n: int, j0: int, base: Presentation) -> Optional[List[FreeElement]]:
    """Solve ξ·x_i° = Σ_j M_ij ξ·x_j modulo coboundaries on degree-1 generators.

    Returns the images of all generators of ``base`` (generators of other
    degrees are left fixed), or None when the lowest class is not
    one-dimensional or the action cannot be matched.
    """
    complex_ = t.complex
    if complex_ is None or complex_.dim(n, j0) != 1:
        return None
    env_rs = complex_.rs
    if j0 + 1 + complex_.top_degree() > env_rs.complete_below:
        return None
    space = RowSpace(env_rs.field)
    space.extend(complex_.coboundaries(n, j0))
    xi = next((z for z in complex_.cocycles(n, j0) if space.add(z)), None)
    if xi is None:
        return None
    m = len(base.generators)
    f = base.field
    linear = [i for i, g in enumerate(base.generators) if g.degree == 1]
    left = [complex_.act(n, j0, xi, FreeElement.monomial((i,), f)) for i in linear]
    coboundaries = complex_.coboundaries(n, j0 + 1)
    images = [FreeElement.monomial((i,), f) for i in range(m)]
    for i in linear:
        right = complex_.act(n, j0, xi, FreeElement.monomial((m + i,), f))
        solution = solve(left + coboundaries, right, f)
        if solution is None:
            logger.info("right action of generator %d is not a combination of left actions", i)
            return None
        images[i] = FreeElement({(k,): solution[pos] for pos, k in enumerate(linear)}, f)
    return images


def rigidity_check(
    t: ExtTable, hilbert: GradedDims, base_rs: Optional[RewriteSystem] = None
) -> RigidityVerdict:
    """Concentration of Hochschild Ext in one index with the dims of a shifted A."""
    if t.side != OVER_AE:
        raise exceptions.InputError("rigidity needs Ext over the enveloping algebra")
    bounds = {"window": list(t.window), "hilbert_certified_to": hilbert.certified_to}
    nonzero = t.nonzero()
    indices = sorted({i for i, _ in nonzero})
    if len(indices) != 1:
        reason = "no certified nonzero entry" if not indices else f"nonzero in indices {indices}"
        return RigidityVerdict(None, False, certified_bounds=bounds, reason=reason)
    n = indices[0]
    j0 = min(j for i, j in nonzero if i == n)
    shift = -j0
    compared = 0
    for (i, j), value in sorted(t.entries.items()):
        if i != n or not t.is_certified(i, j) or j + shift > hilbert.certified_to:
            continue
        compared += 1
        if value != hilbert[j + shift]:
            return RigidityVerdict(
                n,
                False,
                shift,
                certified_bounds=bounds,
                reason=f"Ext^{n} has dimension {value} in degree {j}, A has {hilbert[j + shift]} in degree {j + shift}",
            )
    if not compared:
        return RigidityVerdict(n, False, shift, certified_bounds=bounds, reason="nothing to compare in the window")
    twist = None
    verified = None
    if base_rs is not None:
        images = extract_twist(t, n, j0, base_rs.presentation)
        if images is not None:
            base = base_rs.presentation
            twist = {g.name: base.format(images[k]) for k, g in enumerate(base.generators)}
            verified = verify_twist(base_rs, images)
    return RigidityVerdict(n, True, shift, twist, verified, bounds)


def invariant_report(
    as_verdict: Optional[ASVerdict], rigidity: Optional[RigidityVerdict], b: Optional[BettiTable]
) -> Dict[str, object]:
    """Translate certified verdicts into statements about transcendence degrees."""
    invariants: Dict[str, object] = {
        "fhtr": None,
        "htr_QA_conditional": None,
        "hammerhead": None,
        "statements": [],
    }
    statements: List[str] = invariants["statements"]
    if as_verdict is not None and as_verdict.regular:
        n = as_verdict.n
        invariants.update(fhtr=n, htr_QA_conditional=n, hammerhead=n)
        statements.append(
            f"fhtr = {n}; htr of the quotient division ring = {n}, "
            "conditional on A being Goldie prime (not machine-checked)"
        )
    if rigidity is not None and rigidity.rigid:
        n = rigidity.concentrated_at
        if invariants["fhtr"] is None:
            invariants.update(fhtr=n, hammerhead=n)
        statements.append(f"fhtr = {n} (certified in window)")
    if invariants["hammerhead"] is not None:
        statements.append(f"hammerhead of the shifted twisted dualizing object = {invariants['hammerhead']}")
    if not statements:
        statements.append("no transcendence degree claim; raw tables only")
    if b is not None:
        invariants["betti_length"] = b.length
    return invariants


def unchecked_hypotheses(p: Presentation) -> List[str]:
    hypotheses = [GOLDIE_HYPOTHESIS, TRUNCATION_HYPOTHESIS]
    hypotheses.extend(note for note in p.notes if "endomorphism-checked" in note)
    return hypotheses


def report(
    p: Presentation,
    bounds: Mapping[str, object],
    hilbert: Optional[Mapping[str, object]] = None,
    betti_table: Optional[Mapping[str, object]] = None,
    ext_table: Optional[ExtTable] = None,
    hochschild: Optional[ExtTable] = None,
    as_verdict: Optional[ASVerdict] = None,
    rigidity: Optional[RigidityVerdict] = None,
    invariants: Optional[Mapping[str, object]] = None,
) -> Dict[str, object]:
    """The report record; sections that were not computed are null."""
    return {
        "algebra": p.label,
        "field": str(p.field),
        "bounds": dict(bounds),
        "hilbert": hilbert,
        "betti": betti_table,
        "ext_k_A": ext_table.to_dict() if ext_table is not None else None,
        "hochschild": hochschild.to_dict() if hochschild is not None else None,
        "as_verdict": as_verdict.to_dict() if as_verdict is not None else None,
        "rigidity": rigidity.to_dict() if rigidity is not None else None,
        "invariants": dict(invariants) if invariants is not None else None,
        "unchecked_hypotheses": unchecked_hypotheses(p),
        "notes": [note for note in p.notes if "endomorphism-checked" not in note],
    }
