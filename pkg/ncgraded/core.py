import json
import logging
import random
import sys
from dataclasses import dataclass, replace
from datetime import datetime
from typing import Dict, FrozenSet, List, Optional

import jmespath
import numpy
from dateutil.tz import tzutc
from jmespath.exceptions import JMESPathError
from termcolor import colored

from . import exceptions
from ._version import __version__
from .duality import (
    as_check,
    betti_agreement,
    diagonal_bimodule_resolution,
    ext_k_A,
    hochschild_ext,
    invariant_report,
    report,
    rigidity_check,
)
from .exactla import FieldSpec
from .freealg import FreeElement
from .groebner import RewriteSystem, complete, is_closed, normal_form, reduce_with
from .hilbert import gk_estimate, hilbert_function, verify_rational
from .presentation import Presentation, builtin, enveloping, opposite, parse
from .resolution import (
    betti,
    differential_squares_to_zero,
    euler_characteristic_defects,
    gldim_upto,
    koszul_check,
    minimal_resolution,
)

logger = logging.getLogger(__name__)

CHECKS = ("hilbert", "betti", "koszul", "asregular", "hochschild", "rigidity", "normal-elements", "gk")
DEFAULT_CHECKS = "hilbert,betti"

SCAN_GUARD = 2 ** 22
SCAN_CHUNK = 4096
SCAN_EXAMPLES = 8
CONFLUENCE_SAMPLES = 8


@dataclass(frozen=True)
class RunConfig:
    input: str
    builtin: bool
    field: Optional[FieldSpec]
    degree_bound: int = 8
    homological_bound: int = 5
    checks: FrozenSet[str] = frozenset(("hilbert", "betti"))
    claim: Optional[str] = None
    output: str = "text"
    seed: int = 0
    scan_prime: int = 2
    scan_degree: int = 3

    def __post_init__(self):
        if self.degree_bound < 2:
            raise exceptions.InputError(f"the degree bound must be at least 2, not {self.degree_bound}")
        if self.homological_bound < 1:
            raise exceptions.InputError(
                f"the homological bound must be at least 1, not {self.homological_bound}"
            )
        unknown = sorted(self.checks - set(CHECKS))
        if unknown:
            raise exceptions.InputError(
                f"unknown check {', '.join(unknown)} (choose from {', '.join(CHECKS)})"
            )

    @classmethod
    def from_options(cls, **kwargs) -> "RunConfig":
        """Build a config from parsed command-line options; unset options keep defaults."""
        field = kwargs.get("field")
        if isinstance(field, str):
            field = FieldSpec.parse(field)
        checks = kwargs.get("checks") or DEFAULT_CHECKS
        if isinstance(checks, str):
            checks = [c.strip() for c in checks.split(",") if c.strip()]
        source = kwargs.get("builtin")
        given = {
            key: kwargs[key]
            for key in ("degree_bound", "homological_bound", "claim", "seed", "scan_prime", "scan_degree")
            if kwargs.get(key) is not None
        }
        return cls(
            input=source if source else kwargs.get("input"),
            builtin=bool(source),
            field=field,
            checks=frozenset(checks),
            output="json" if kwargs.get("json") == "-" else "text",
            **given,
        )


def load_presentation(cfg: RunConfig) -> Presentation:
    if cfg.input is None:
        raise exceptions.InputError("give an algebra with --builtin NAME or --input FILE")
    if cfg.builtin:
        return builtin(cfg.input, cfg.field)
    try:
        with open(cfg.input) as handle:
            text = handle.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise exceptions.UnreadableInputError(cfg.input, getattr(exc, "strerror", None) or str(exc))
    return parse(text, cfg.field)


# ----- normal elements ------------------------------------------------------


def _inverse_table(p: int) -> numpy.ndarray:
    table = numpy.zeros(p, dtype=numpy.int64)
    for x in range(1, p):
        table[x] = pow(x, -1, p)
    return table


def batched_rank(mats: numpy.ndarray, p: int) -> numpy.ndarray:
    """Rank mod ``p`` of every matrix in a stack of shape (N, rows, cols)."""
    a = numpy.array(mats, dtype=numpy.int64) % p
    count, rows, cols = a.shape
    inverse = _inverse_table(p)
    ranks = numpy.zeros(count, dtype=numpy.int64)
    row_index = numpy.arange(rows)
    for c in range(cols):
        mask = (a[:, :, c] != 0) & (row_index[None, :] >= ranks[:, None])
        has = mask.any(axis=1)
        if not has.any():
            continue
        sel = numpy.nonzero(has)[0]
        pivots = mask[sel].argmax(axis=1)
        targets = ranks[sel]
        swapped = a[sel, targets].copy()
        a[sel, targets] = a[sel, pivots]
        a[sel, pivots] = swapped
        scale = inverse[a[sel, targets, c]]
        a[sel, targets] = (a[sel, targets] * scale[:, None]) % p
        factors = a[sel, :, c].copy()
        factors[numpy.arange(len(sel)), targets] = 0
        a[sel] = (a[sel] - factors[:, :, None] * a[sel, targets][:, None, :]) % p
        ranks[sel] += 1
    return ranks


def _multiplication_matrix(rs: RewriteSystem, d: int, word, left: bool) -> numpy.ndarray:
    """Matrix of multiplication by ``word`` from A_d to A_{d+|word|}."""
    source = rs.words_of_degree(d)
    target = rs.words_of_degree(d + sum(rs.weights[a] for a in word))
    index = {w: n for n, w in enumerate(target)}
    p = rs.field.size
    m = numpy.zeros((len(target), len(source)), dtype=numpy.int64)
    for k, b in enumerate(source):
        product = rs.reduce_word(word + b if left else b + word)
        for w, c in product.items():
            m[index[w], k] = int(c) % p
    return m


def _projective_chunks(p: int, n: int):
    """Nonzero vectors of F_p^n whose first nonzero coordinate is 1, in chunks."""
    powers = p ** numpy.arange(n - 1, -1, -1, dtype=numpy.int64)
    total = p ** n
    for start in range(1, total, SCAN_CHUNK):
        ints = numpy.arange(start, min(start + SCAN_CHUNK, total), dtype=numpy.int64)
        digits = (ints[:, None] // powers[None, :]) % p
        leading = digits[numpy.arange(len(ints)), (digits != 0).argmax(axis=1)]
        yield digits[leading == 1]


def _contained(span: List[numpy.ndarray], candidate: numpy.ndarray, p: int) -> numpy.ndarray:
    # candidate[k] lies in the span of span[*][k], for every k
    if not span:
        return ~(candidate % p).any(axis=1)
    base = numpy.stack(span, axis=2)
    extended = numpy.concatenate([base, candidate[:, :, None]], axis=2)
    return batched_rank(base, p) == batched_rank(extended, p)


def normal_element_scan(rs: RewriteSystem, dmax: int) -> Dict[str, object]:
    """Enumerate A_d up to scalars and report the normal elements found.

    Only meaningful over a small prime field; a clean scan is evidence over
    that field, never a proof.
    """
    f = rs.field
    if f.is_rational:
        raise exceptions.InputError("the normal element scan needs a prime field")
    p = f.size
    reach = dmax + max(rs.weights, default=0)
    if reach > rs.complete_below:
        raise exceptions.UncertifiedDegreeError(reach, rs.complete_below)
    presentation = rs.presentation
    generators = [(a,) for a in range(len(rs.weights))]
    findings = []
    for d in range(1, dmax + 1):
        basis = rs.words_of_degree(d)
        n = len(basis)
        if p ** n > SCAN_GUARD:
            raise exceptions.ScanGuardError(p ** n, d)
        if n == 0:
            findings.append({"degree": d, "checked": 0, "normal": 0, "examples": []})
            continue
        conditions = []
        for g in generators:
            e = rs.weights[g[0]]
            words = rs.words_of_degree(e)
            conditions.append(
                (
                    _multiplication_matrix(rs, d, g, left=True),
                    [_multiplication_matrix(rs, d, w, left=False) for w in words],
                    _multiplication_matrix(rs, d, g, left=False),
                    [_multiplication_matrix(rs, d, w, left=True) for w in words],
                )
            )
        checked = 0
        normal = 0
        examples = []
        for vectors in _projective_chunks(p, n):
            checked += len(vectors)
            ok = numpy.ones(len(vectors), dtype=bool)
            for g_left, right_words, g_right, left_words in conditions:
                # g·v in v·A_e and v·g in A_e·v
                for mult, span in ((g_left, right_words), (g_right, left_words)):
                    live = numpy.nonzero(ok)[0]
                    if not len(live):
                        break
                    v = vectors[live]
                    candidate = (v @ mult.T) % p
                    images = [(v @ m.T) % p for m in span]
                    ok[live] = _contained(images, candidate, p)
            normal += int(ok.sum())
            for row in vectors[ok][: max(SCAN_EXAMPLES - len(examples), 0)]:
                element = FreeElement({basis[k]: int(c) for k, c in enumerate(row) if c}, f)
                examples.append(presentation.format(element))
        logger.info("normal element scan, degree %d: %d of %d normal", d, normal, checked)
        findings.append({"degree": d, "checked": checked, "normal": normal, "examples": examples})
    return {
        "field": str(f),
        "upto": dmax,
        "degrees": findings,
        "found": any(item["normal"] for item in findings),
        "note": f"heuristic: enumeration over {f} only",
    }


# ----- self checks ------------------------------------------------------------


def _random_word(rng: random.Random, weights, degree: int):
    word = []
    remaining = degree
    while remaining:
        letters = [a for a, w in enumerate(weights) if w <= remaining]
        if not letters:
            return None
        a = rng.choice(letters)
        word.append(a)
        remaining -= weights[a]
    return tuple(word)


def confluence_sample(rs: RewriteSystem, seed: int, samples: int = CONFLUENCE_SAMPLES) -> bool:
    """Random elements reduce to the same normal form under a random strategy."""
    rng = random.Random(seed)
    f = rs.field
    top = rs.complete_below
    for _ in range(samples):
        degree = rng.randint(1, top)
        words = [_random_word(rng, rs.weights, degree) for _ in range(3)]
        terms = {w: f.coerce(rng.randint(1, 7)) for w in words if w is not None}
        e = FreeElement(terms, f)
        if reduce_with(rs, e, lambda sites: rng.choice(sites)) != normal_form(rs, e):
            logger.warning("reduction order changed a normal form in degree %d", degree)
            return False
    return True


# ----- comparisons ------------------------------------------------------------


def mismatches(expected, actual, path: str = "") -> List[str]:
    """Where ``actual`` disagrees with the fields present in ``expected``."""
    if isinstance(expected, dict):
        if not isinstance(actual, dict):
            return [f"{path or '.'}: expected an object, found {actual!r}"]
        out = []
        for key, value in sorted(expected.items()):
            out.extend(mismatches(value, actual.get(key), f"{path}.{key}"))
        return out
    if expected != actual:
        return [f"{path or '.'}: expected {expected!r}, found {actual!r}"]
    return []


def load_expectation(path: str) -> Dict[str, object]:
    try:
        with open(path) as handle:
            return json.load(handle)
    except OSError as exc:
        raise exceptions.UnreadableInputError(path, exc.strerror or str(exc))
    except ValueError as exc:
        raise exceptions.UnreadableInputError(path, f"not JSON ({exc})")


class Pipeline(object):
    """One run: complete, count, resolve and dualize as the checks require."""

    VERDICT_COLORS = {"ok": "green", "fail": "red", "unknown": "yellow"}

    def __init__(self, **kwargs):
        self.config = RunConfig.from_options(**kwargs)
        self.color_preference = kwargs.get("color") or "auto"
        self.json_path = kwargs.get("json")
        self.expect = kwargs.get("expect")
        self.query = kwargs.get("query")
        if self.query is not None:
            try:
                self.query_expression = jmespath.compile(self.query)
            except JMESPathError as exc:
                raise exceptions.InputError(f"bad query {self.query!r} ({exc})")
        self.results: Dict[str, object] = {}
        self.failures: List[str] = []

    def color(self, text, color):
        """Returns coloured version of ``text`` honoring ``--color``."""
        kwargs = {
            "always": {"force_color": True},
            "never": {"no_color": True},
            "auto": {},
        }
        return colored(text, color, **kwargs[self.color_preference])

    def verdict(self, text, state):
        return self.color(text, self.VERDICT_COLORS[state])

    def wants(self, *checks) -> bool:
        return bool(self.config.checks & set(checks))

    def compute(self) -> Dict[str, object]:
        cfg = self.config
        D, h = cfg.degree_bound, cfg.homological_bound
        p = load_presentation(cfg)
        rs = complete(p, D)
        r = self.results
        r.update(presentation=p, rs=rs, closed=is_closed(rs))
        self_checks: Dict[str, object] = {"seed": cfg.seed, "confluence": confluence_sample(rs, cfg.seed)}

        dims = None
        if self.wants("hilbert", "koszul", "rigidity", "gk") or cfg.claim:
            dims = r["dims"] = hilbert_function(rs, D)
            if cfg.claim:
                r["claim_ok"] = verify_rational(dims, cfg.claim)
            if self.wants("gk"):
                r["gk"] = gk_estimate(dims)

        b = None
        stages = None
        if self.wants("betti", "koszul", "asregular", "hochschild"):
            stages = minimal_resolution(rs, h, D)
            b = r["betti"] = betti(stages)
            r["gldim"] = gldim_upto(b)
            self_checks["d_squared_zero"] = differential_squares_to_zero(rs, stages)
            if dims is not None:
                self_checks["euler_defects"] = euler_characteristic_defects(stages, dims)
            if self.wants("koszul"):
                r["koszul"] = koszul_check(b, dims)

        if self.wants("asregular"):
            left = r["ext_k_A"] = ext_k_A(rs, stages)
            op_rs = complete(opposite(p), D)
            right = r["ext_k_A_op"] = ext_k_A(op_rs, minimal_resolution(op_rs, h, D))
            r["as_verdict"] = as_check(left, right, r["gldim"])

        if self.wants("hochschild", "rigidity"):
            env_rs = complete(enveloping(p), D)
            one_sided = b if b is not None else betti(minimal_resolution(rs, h, D))
            bimodule = r["bimodule"] = diagonal_bimodule_resolution(p, h, D, env_rs, one_sided)
            r["hochschild"] = hochschild_ext(env_rs, bimodule.stages)
            if b is not None:
                r["betti_disagreement"] = betti_agreement(b, bimodule.betti)
            if self.wants("rigidity"):
                if dims is None:
                    dims = r["dims"] = hilbert_function(rs, D)
                r["rigidity"] = rigidity_check(r["hochschild"], dims, rs)

        if self.wants("normal-elements"):
            # reload so coefficients are read over the scan field, not reduced from the run field
            try:
                scan_p = load_presentation(replace(cfg, field=FieldSpec.prime(cfg.scan_prime)))
            except ZeroDivisionError:
                raise exceptions.InputError(f"the relations have no image over F{cfg.scan_prime}")
            bound = max(cfg.scan_degree + max(scan_p.weights, default=1), scan_p.max_relation_degree)
            scan_rs = complete(scan_p, bound)
            r["normal_elements"] = normal_element_scan(scan_rs, cfg.scan_degree)

        r["self_checks"] = self_checks
        return r

    def record(self) -> Dict[str, object]:
        """The JSON report of what ``compute`` produced."""
        r = self.results
        cfg = self.config
        p = r["presentation"]
        hilbert = None
        if "dims" in r:
            hilbert = r["dims"].to_dict()
            if cfg.claim:
                hilbert["claim"] = {"text": cfg.claim, "ok": r["claim_ok"]}
            if "gk" in r:
                hilbert["gk"] = r["gk"].to_dict()
        betti_section = None
        if "betti" in r:
            betti_section = r["betti"].to_dict()
            betti_section["gldim"] = r["gldim"].to_dict()
            if "koszul" in r:
                betti_section["koszul"] = r["koszul"].to_dict()
        as_verdict = r.get("as_verdict")
        rigidity = r.get("rigidity")
        invariants = None
        if as_verdict is not None or rigidity is not None:
            invariants = invariant_report(as_verdict, rigidity, r.get("betti"))
        out = report(
            p,
            {
                "degree": cfg.degree_bound,
                "homological": cfg.homological_bound,
                "complete_below": r["rs"].complete_below,
                "closed": r["closed"],
            },
            hilbert,
            betti_section,
            r.get("ext_k_A"),
            r.get("hochschild"),
            as_verdict,
            rigidity,
            invariants,
        )
        if "ext_k_A_op" in r:
            out["ext_k_A_op"] = r["ext_k_A_op"].to_dict()
        if "bimodule" in r:
            out["bimodule_betti"] = r["bimodule"].betti.to_dict()
            if "betti_disagreement" in r:
                out["bimodule_betti"]["disagreement"] = [list(key) for key in r["betti_disagreement"]]
        out["normal_elements"] = r.get("normal_elements")
        out["self_checks"] = r["self_checks"]
        out["checks"] = sorted(cfg.checks)
        out["version"] = __version__
        out["generated_at"] = datetime.now(tz=tzutc()).isoformat()
        return out

    def check_failures(self, record: Dict[str, object]) -> List[str]:
        failures = []
        if self.config.claim and not self.results.get("claim_ok"):
            failures.append(f"Hilbert series differs from {self.config.claim}")
        checks = self.results["self_checks"]
        if not checks["confluence"]:
            failures.append("normal forms depend on the reduction order")
        if checks.get("d_squared_zero") is False:
            failures.append("a differential does not square to zero")
        if checks.get("euler_defects"):
            failures.append(f"Euler characteristic fails in degrees {checks['euler_defects']}")
        if "betti_disagreement" in self.results and self.results["betti_disagreement"]:
            failures.append(f"bimodule and one-sided Betti numbers differ at {self.results['betti_disagreement']}")
        if self.expect:
            failures.extend(mismatches(load_expectation(self.expect), record))
        return failures

    def run(self) -> int:
        self.compute()
        record = self.record()
        self.failures = self.check_failures(record)
        if self.json_path and self.json_path != "-":
            with open(self.json_path, "w") as handle:
                handle.write(dumps(record) + "\n")
        if self.query is not None:
            sys.stdout.write(json.dumps(self.query_expression.search(record), sort_keys=True) + "\n")
        elif self.config.output == "json":
            sys.stdout.write(dumps(record) + "\n")
        else:
            sys.stdout.write(self.text_report(record))
        sys.stdout.flush()
        for failure in self.failures:
            logger.error("%s", failure)
        return 1 if self.failures else 0

    # ----- text report -----

    def _line(self, label, text, state=None):
        text = self.verdict(text, state) if state else text
        return f"{label:<22}{text}\n"

    def text_report(self, record: Dict[str, object]) -> str:
        r = self.results
        p = r["presentation"]
        out = [
            self.color(f"{p.label} over {p.field}", "cyan") + "\n",
            self._line("generators", ", ".join(f"{g.name}:{g.degree}" for g in p.generators)),
            self._line("relations", str(len(p.relations))),
            self._line(
                "groebner",
                f"{len(r['rs'])} rules, complete below {r['rs'].complete_below}"
                + (", closed" if r["closed"] else ""),
            ),
        ]
        if "dims" in r:
            out.append(self._line("hilbert", " ".join(str(n) for n in r["dims"].dims)))
            if self.config.claim:
                ok = r["claim_ok"]
                out.append(self._line("claim", f"{self.config.claim}: " + ("ok" if ok else "differs"), "ok" if ok else "fail"))
            if "gk" in r:
                gk = r["gk"]
                value = gk.kind if gk.value is None else f"{gk.value:g} ({gk.kind})"
                out.append(self._line("gk (heuristic)", value, "unknown"))
        if "betti" in r:
            out.append("betti\n" + r["betti"].grid() + "\n")
            gldim = r["gldim"]
            out.append(self._line("gldim", str(gldim), "ok" if gldim.certified else "unknown"))
            if "koszul" in r:
                koszul = r["koszul"]
                state = "ok" if koszul.koszul else ("unknown" if koszul.status == "not-applicable" else "fail")
                out.append(self._line("koszul", str(koszul), state))
        if "as_verdict" in r:
            verdict = r["as_verdict"]
            out.append("ext_k_A\n" + r["ext_k_A"].grid() + "\n")
            state = {"regular": "ok", "gorenstein_conditions_hold": "ok", "fails": "fail"}.get(verdict.status, "unknown")
            out.append(self._line("as-regular", str(verdict), state))
        if "hochschild" in r:
            out.append("hochschild ext\n" + r["hochschild"].grid() + "\n")
        if "rigidity" in r:
            rigidity = r["rigidity"]
            out.append(self._line("rigidity", str(rigidity), "ok" if rigidity.rigid else "unknown"))
        if record.get("invariants"):
            for statement in record["invariants"]["statements"]:
                out.append(self._line("invariant", statement))
        scan = r.get("normal_elements")
        if scan:
            for item in scan["degrees"]:
                examples = ", ".join(item["examples"])
                text = f"degree {item['degree']}: {item['normal']} of {item['checked']}"
                out.append(self._line("normal elements", text + (f" ({examples})" if examples else ""), "unknown"))
        for hypothesis in record["unchecked_hypotheses"]:
            out.append(self._line("unchecked", hypothesis))
        for note in record["notes"]:
            out.append(self._line("note", note))
        for failure in self.failures:
            out.append(self._line("mismatch", failure, "fail"))
        return "".join(out)


def dumps(record: Dict[str, object]) -> str:
    return json.dumps(record, sort_keys=True, indent=2, default=str)
