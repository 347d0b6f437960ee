"""Formal motive expressions and the zero-dimensional decomposition report.

Étale algebras appear only through their degree multisets: a permutation
lattice ``sum Z[G/H_i]`` corresponds to the product of fields of degrees
``[G : H_i]``.  Expressions are multisets and are never simplified, so a
``Z(1)`` occurring on both sides of a relation stays on both sides.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .groups import FiniteMatrixGroup, Subgroup
from .lattice import DEFAULT_ISO_BOUND, GLattice
from .linalg import Obstruction
from .resolutions import (
    PermutationDescriptor,
    Resolution,
    complement_summand,
    coflasque_resolution,
    is_invertible,
    is_permutation,
)

MAX_TWIST = 2
# section matrices larger than this are summarized rather than printed
WITNESS_PRINT_LIMIT = 64


class TermKind(str, Enum):
    TATE = "tate"
    ETALE = "etale"
    MIDDLE = "middle"
    SURFACE = "surface"


_KIND_ORDER = {k: i for i, k in enumerate(TermKind)}


class Verdict(str, Enum):
    ZERO_DIMENSIONAL = "ZeroDimensional"
    NOT_INVERTIBLE = "NotInvertible"
    INVERTIBLE_NO_ZERO_CYCLE = "InvertibleNoZeroCycleAssumed"


@dataclass(frozen=True)
class EtaleAlgebraDescriptor:
    """Degrees of the field factors, largest first."""

    degrees: tuple[int, ...]
    symbol: str = "E"

    def __post_init__(self):
        if any(d < 1 for d in self.degrees):
            raise ValueError(f"field degrees must be positive, got {self.degrees}")
        object.__setattr__(self, "degrees", tuple(sorted(self.degrees, reverse=True)))

    @property
    def total_degree(self) -> int:
        return sum(self.degrees)

    @property
    def label(self) -> str:
        if len(self.degrees) == 1:
            return f"{self.symbol}_{self.degrees[0]}"
        return f"{self.symbol}_{{{','.join(map(str, self.degrees))}}}"


@dataclass(frozen=True)
class MotiveTerm:
    kind: TermKind
    twist: int = 0
    algebra: EtaleAlgebraDescriptor | None = None

    def __post_init__(self):
        if not 0 <= self.twist <= MAX_TWIST:
            raise ValueError(f"twist must lie in [0, {MAX_TWIST}], got {self.twist}")
        if (self.kind is TermKind.ETALE) != (self.algebra is not None):
            raise ValueError("exactly the etale terms carry an algebra")

    def sort_key(self):
        degs = self.algebra.degrees if self.algebra else ()
        return (self.twist, _KIND_ORDER[self.kind], degs)

    def text(self) -> str:
        base = {
            TermKind.TATE: "Z",
            TermKind.SURFACE: "S",
            TermKind.MIDDLE: "(S,rho)",
        }.get(self.kind)
        if self.kind is TermKind.ETALE:
            base = f"Spec {self.algebra.label}"
            if self.twist:
                base = f"({base})"
        return f"{base}({self.twist})" if self.twist else base

    def as_dict(self) -> dict:
        d = {"kind": self.kind.value, "twist": self.twist}
        if self.algebra is not None:
            d["degrees"] = list(self.algebra.degrees)
            d["symbol"] = self.algebra.symbol
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MotiveTerm":
        kind = TermKind(d["kind"])
        alg = None
        if kind is TermKind.ETALE:
            alg = EtaleAlgebraDescriptor(tuple(d["degrees"]), d.get("symbol", "E"))
        return cls(kind, d["twist"], alg)


def tate(twist: int = 0) -> MotiveTerm:
    return MotiveTerm(TermKind.TATE, twist)


def etale(algebra: EtaleAlgebraDescriptor, twist: int = 1) -> MotiveTerm:
    return MotiveTerm(TermKind.ETALE, twist, algebra)


@dataclass(frozen=True)
class MotiveExpression:
    """A formal direct sum; equality is multiset equality."""

    terms: tuple[MotiveTerm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(sorted(self.terms, key=MotiveTerm.sort_key)))

    def __add__(self, other: "MotiveExpression") -> "MotiveExpression":
        return MotiveExpression(self.terms + other.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def count(self, term: MotiveTerm) -> int:
        return self.terms.count(term)

    def text(self) -> str:
        return " + ".join(t.text() for t in self.terms) or "0"

    def as_list(self) -> list[dict]:
        return [t.as_dict() for t in self.terms]


@dataclass
class DecompositionReport:
    verdict: Verdict
    zero_cycle_assumed: bool
    zero_cycle_source: str = "none"
    summand_statement: tuple[MotiveExpression, MotiveExpression] | None = None
    middle_relation: tuple[MotiveExpression, MotiveExpression] | None = None
    certificates: dict = field(default_factory=dict)

    def __post_init__(self):
        zd = self.verdict is Verdict.ZERO_DIMENSIONAL
        if zd and not (self.zero_cycle_assumed and self.certificates.get("section") is not None):
            raise AssertionError("ZeroDimensional needs a section witness and the zero-cycle assumption")


def etale_from_descriptor(G: FiniteMatrixGroup, d: PermutationDescriptor, symbol: str = "E") -> EtaleAlgebraDescriptor:
    """One field factor of degree ``[G : H]`` per part ``H``."""
    for H in d.parts:
        if H.parent is not G:
            raise ValueError(f"part {H.name} is not a subgroup of the given group")
    return EtaleAlgebraDescriptor(tuple(H.index for H in d.parts), symbol)


def summand_statement(E: EtaleAlgebraDescriptor) -> tuple[MotiveExpression, MotiveExpression]:
    """``S`` is a direct summand of ``Z + (Spec E)(1) + Z(2)``."""
    left = MotiveExpression((MotiveTerm(TermKind.SURFACE, 0),))
    return left, MotiveExpression((tate(0), etale(E, 1), tate(2)))


def middle_relation(E: EtaleAlgebraDescriptor, F: EtaleAlgebraDescriptor) -> tuple[MotiveExpression, MotiveExpression]:
    """``(S,rho) + (Spec F)(1) = (Spec E)(1)``; a zero algebra ``F`` drops out."""
    terms = [MotiveTerm(TermKind.MIDDLE, 0)]
    if F.degrees:
        terms.append(etale(F, 1))
    left = MotiveExpression(tuple(terms))
    return left, MotiveExpression((etale(E, 1),))


def _matrix_certificate(m) -> dict:
    d = {"shape": list(m.shape), "nonzeros": m.nnz()}
    if m.nrows * m.ncols <= WITNESS_PRINT_LIMIT:
        d["rows"] = m.rows
    return d


def decompose_motive(M: GLattice, zero_cycle_assumed: bool = False, *,
                     zero_cycle_source: str | None = None,
                     resolution: Resolution | None = None,
                     iso_bound: int = DEFAULT_ISO_BOUND) -> DecompositionReport:
    """Decide zero-dimensionality of the motive from the Picard lattice ``M``.

    Zero-dimensional exactly when ``M`` is invertible and a zero-cycle of
    degree 1 is asserted by the caller; the latter is not visible on the
    lattice.  Without an explicit resolution a pruned coflasque resolution is
    used, which keeps the étale algebra ``E`` small.
    """
    source = zero_cycle_source or ("flag" if zero_cycle_assumed else "none")
    res = resolution or coflasque_resolution(M, prune=True)
    if res.M.rank != M.rank:
        raise ValueError("resolution does not resolve a lattice of this rank")
    inv = is_invertible(M, res)
    # a supplied resolution may live over its own copy of the group
    G = res.P.group
    certs: dict = {
        "resolution": {
            "P": str(res.descriptor) if res.descriptor else None,
            "rank_P": res.P.rank,
            "rank_C": res.C.rank,
            "coflabby_method": res.coflabby_method,
        },
    }
    if not inv.invertible:
        obs: Obstruction = inv.witness
        certs["obstruction"] = obs.as_dict()
        return DecompositionReport(Verdict.NOT_INVERTIBLE, zero_cycle_assumed, source, certificates=certs)
    certs["section"] = _matrix_certificate(inv.witness.matrix)
    if not zero_cycle_assumed:
        return DecompositionReport(Verdict.INVERTIBLE_NO_ZERO_CYCLE, False, source, certificates=certs)
    E = etale_from_descriptor(G, res.descriptor)
    comp = complement_summand(res)
    certs["complement"] = {
        "rank": comp.lattice.rank,
        "block_unimodular": comp.block_unimodular,
        "idempotent": comp.idempotent,
    }
    if not (comp.block_unimodular and comp.idempotent):
        raise AssertionError("section does not split off a direct summand")
    middle = None
    pv = is_permutation(comp.lattice, iso_bound)
    certs["complement"]["permutation"] = pv.status
    if pv:
        F = etale_from_descriptor(G, pv.descriptor, symbol="F")
        certs["complement"]["descriptor"] = str(pv.descriptor)
        middle = middle_relation(E, F)
    return DecompositionReport(Verdict.ZERO_DIMENSIONAL, True, source,
                               summand_statement=summand_statement(E),
                               middle_relation=middle, certificates=certs)


def dp5_motive(W: Subgroup) -> tuple[MotiveExpression, MotiveExpression]:
    """``S + Z(1)`` and ``Z + Z(1) + (Spec E)(1) + Z(2)`` with ``E`` from the orbits of ``W`` on five points."""
    from .delpezzo import dp5_orbit_sizes

    E = EtaleAlgebraDescriptor(tuple(dp5_orbit_sizes(W)))
    left = MotiveExpression((MotiveTerm(TermKind.SURFACE, 0), tate(1)))
    right = MotiveExpression((tate(0), tate(1), etale(E, 1), tate(2)))
    return left, right


# rendering -----------------------------------------------------------------

def _pair_text(pair, sep: str) -> str:
    return f"{pair[0].text()} {sep} {pair[1].text()}"


def render(obj, format: str = "text"):
    """Text (a string) or structured (a JSON-ready dict) form of an expression, pair or report."""
    if format not in ("text", "structured"):
        raise ValueError(f"unknown format {format!r}")
    if isinstance(obj, MotiveExpression):
        return obj.text() if format == "text" else {"type": "expression", "terms": obj.as_list()}
    if isinstance(obj, tuple) and len(obj) == 2 and all(isinstance(x, MotiveExpression) for x in obj):
        if format == "text":
            return _pair_text(obj, "=")
        return {"type": "relation", "left": obj[0].as_list(), "right": obj[1].as_list()}
    if isinstance(obj, DecompositionReport):
        return _render_report(obj) if format == "text" else _report_dict(obj)
    raise TypeError(f"cannot render {type(obj).__name__}")


def _report_dict(r: DecompositionReport) -> dict:
    def pair(p):
        return None if p is None else {"left": p[0].as_list(), "right": p[1].as_list()}

    return {
        "type": "decomposition",
        "verdict": r.verdict.value,
        "zero_cycle_assumed": r.zero_cycle_assumed,
        "zero_cycle_source": r.zero_cycle_source,
        "summand_statement": pair(r.summand_statement),
        "middle_relation": pair(r.middle_relation),
        "certificates": r.certificates,
    }


def _render_report(r: DecompositionReport) -> str:
    lines = [f"verdict: {r.verdict.value}",
             f"zero-cycle of degree 1: {'assumed' if r.zero_cycle_assumed else 'not assumed'} (source: {r.zero_cycle_source})"]
    if r.summand_statement:
        lines.append(f"summand: {_pair_text(r.summand_statement, 'is a direct summand of')}")
    if r.middle_relation:
        lines.append(f"middle part: {_pair_text(r.middle_relation, '=')}")
    res = r.certificates.get("resolution")
    if res:
        lines.append(f"resolution: P = {res['P']} (rank {res['rank_P']}), C rank {res['rank_C']}")
    if "obstruction" in r.certificates:
        o = r.certificates["obstruction"]
        lines.append("obstruction:")
        lines.append(f"  reason: {o['reason']}")
        lines.append(f"  invariant factors: {o['invariant_factors']}")
    if "section" in r.certificates:
        s = r.certificates["section"]
        lines.append(f"section: {s['shape'][0]}x{s['shape'][1]} matrix, {s['nonzeros']} nonzero entries")
    if "complement" in r.certificates:
        c = r.certificates["complement"]
        lines.append(f"complement: rank {c['rank']}, block unimodular {c['block_unimodular']}, "
                     f"idempotent {c['idempotent']}, permutation {c['permutation']}")
    return "\n".join(lines)


def parse(doc: dict):
    """Inverse of ``render(..., "structured")``."""
    kind = doc.get("type")

    def expr(lst):
        return MotiveExpression(tuple(MotiveTerm.from_dict(t) for t in lst))

    def pair(p):
        return None if p is None else (expr(p["left"]), expr(p["right"]))

    if kind == "expression":
        return expr(doc["terms"])
    if kind == "relation":
        return pair(doc)
    if kind == "decomposition":
        return DecompositionReport(Verdict(doc["verdict"]), doc["zero_cycle_assumed"], doc["zero_cycle_source"],
                                   pair(doc["summand_statement"]), pair(doc["middle_relation"]),
                                   doc["certificates"])
    raise ValueError(f"unknown document type {kind!r}")
