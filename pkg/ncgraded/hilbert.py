"""Hilbert functions, rational Hilbert series claims and growth estimates."""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy
import sympy
from sympy.polys.polyerrors import BasePolynomialError

from . import exceptions
from .groebner import RewriteSystem

logger = logging.getLogger(__name__)

EXPONENTIAL_RATIO = 1.5
# fewer points make any short sequence look polynomial
MIN_TAIL = 3

T = sympy.Symbol("t")


@dataclass(frozen=True)
class GradedDims:
    dims: Tuple[int, ...]
    certified_to: int

    def __post_init__(self):
        if self.certified_to > len(self.dims) - 1:
            raise ValueError("certified_to beyond the stored degrees")

    def __getitem__(self, d: int) -> int:
        return self.dims[d] if 0 <= d < len(self.dims) else 0

    def to_dict(self):
        return {"dims": list(self.dims), "certified_to": self.certified_to}


@dataclass(frozen=True)
class Claim:
    text: str
    numerator: Tuple[Fraction, ...]
    denominator: Tuple[Fraction, ...]


def hilbert_function(rs: RewriteSystem, D: int) -> GradedDims:
    if D > rs.complete_below:
        raise exceptions.UncertifiedDegreeError(D, rs.complete_below)
    dims = tuple(len(rs.words_of_degree(d)) for d in range(D + 1))
    return GradedDims(dims, D)


def _coefficients(poly: sympy.Poly) -> Tuple[Fraction, ...]:
    # ascending powers of t
    coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs())]
    return tuple(coeffs)


def parse_claim(text: str) -> Claim:
    """Read a rational function of ``t`` such as ``1/(1-t)^4``."""
    try:
        expr = sympy.sympify(text.replace("^", "**"), locals={"t": T})
        numerator, denominator = sympy.fraction(sympy.together(expr))
        if (numerator.free_symbols | denominator.free_symbols) - {T}:
            raise ValueError("only t may appear")
        num = sympy.Poly(sympy.expand(numerator), T, domain="QQ")
        den = sympy.Poly(sympy.expand(denominator), T, domain="QQ")
    except (sympy.SympifyError, BasePolynomialError, ValueError, TypeError, SyntaxError):
        raise exceptions.MalformedRationalError(text)
    claim = Claim(text, _coefficients(num), _coefficients(den))
    if not claim.denominator or claim.denominator[0] == 0:
        raise exceptions.MalformedRationalError(text)
    return claim


def series_coefficients(claim: Union[str, Claim], n: int) -> List[Fraction]:
    """The first ``n + 1`` power series coefficients of the claim."""
    if isinstance(claim, str):
        claim = parse_claim(claim)
    a, b = claim.numerator, claim.denominator
    out: List[Fraction] = []
    for k in range(n + 1):
        value = a[k] if k < len(a) else Fraction(0)
        for i in range(1, min(k, len(b) - 1) + 1):
            value -= b[i] * out[k - i]
        out.append(value / b[0])
    return out


def verify_rational(g: GradedDims, claimed: Union[str, Claim]) -> bool:
    expected = series_coefficients(claimed, g.certified_to)
    for d, value in enumerate(expected):
        if value != g.dims[d]:
            logger.info("claim differs in degree %d: %s expected, %d found", d, value, g.dims[d])
            return False
    return True


def convolve(a: GradedDims, b: GradedDims) -> GradedDims:
    """Graded dimensions of a tensor product."""
    top = min(a.certified_to, b.certified_to)
    dims = tuple(sum(a[i] * b[d - i] for i in range(d + 1)) for d in range(top + 1))
    return GradedDims(dims, top)


@dataclass(frozen=True)
class GKEstimate:
    kind: str
    value: Optional[float]
    slope: Optional[float]
    window: Tuple[int, int]
    note: str = "heuristic: read off a finite window, never certified"

    def to_dict(self):
        return {
            "kind": self.kind,
            "value": self.value,
            "slope": None if self.slope is None else round(self.slope, 6),
            "window": list(self.window),
            "note": self.note,
        }


def _differences(values: Sequence[int]) -> List[int]:
    return [b - a for a, b in zip(values, values[1:])]


def gk_estimate(g: GradedDims) -> GKEstimate:
    """Estimate GK dimension from the growth of the Hilbert function.

    Eventually constant k-th differences mean polynomial growth of degree
    k, hence GK dimension k + 1.  Otherwise persistent ratios above
    ``EXPONENTIAL_RATIO`` flag exponential growth.  The least-squares slope
    of log(sum of dims) against log(degree) is always reported.
    """
    D = g.certified_to
    if D < 4:
        raise exceptions.WindowTooSmallError(D, 4)
    dims = list(g.dims[: D + 1])
    start = math.ceil(D / 2)
    window = (start, D)

    degrees = numpy.arange(max(start, 1), D + 1, dtype=float)
    cumulative = numpy.cumsum(numpy.array(dims, dtype=float))[max(start, 1) :]
    slope = None
    if numpy.all(cumulative > 0) and len(degrees) >= 2:
        slope = float(numpy.polyfit(numpy.log(degrees), numpy.log(cumulative), 1)[0])

    if all(v == 0 for v in dims[start:]):
        return GKEstimate("finite", 0.0, slope, window)

    values = dims
    for k in range(0, D):
        # values[m] is the k-th difference ending at degree m + k
        tail = [values[m] for m in range(len(values)) if m + k >= start]
        if len(tail) >= MIN_TAIL and len(set(tail)) == 1 and tail[0] != 0:
            logger.debug("constant %d-th differences from degree %d", k, start)
            return GKEstimate("polynomial", float(k + 1), slope, window)
        values = _differences(values)

    ratios = [dims[d] / dims[d - 1] for d in range(max(start, 1), D + 1) if dims[d - 1]]
    if ratios and all(r > EXPONENTIAL_RATIO for r in ratios):
        return GKEstimate("exponential", None, slope, window)
    return GKEstimate("slope", slope, slope, window)
