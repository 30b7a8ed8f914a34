"""Formal calculus of cuspidal symbols and isobaric sums.

Cuspidal representations are formal symbols: an opaque id, a degree, a
pointer to the contragredient symbol, a central-character id, and sampled
unramified local parameter multisets.  Symbols live in an append-only
registry.  On top of them: duals and twists of isobaric sums, the bilinear
Rankin-Selberg factorization, the exact pole order at s = 1, the
admissible-shape validator for transfers of unitary cuspidal data, the
case analysis for pairs of degree-4 descriptors, and association matching
of cuspidal lists from local data.

Equivalence of symbols is decided by symbol identity plus, when local data
is present, agreement of local parameter multisets at all commonly sampled
places; strong multiplicity one is what justifies a.e.-local equality as
the oracle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .satake import (
    CentralCharMismatch,
    PlaceData,
    UnramChar,
    as_char,
    match_multisets,
)


class NotUnitaryNormalized(ValueError):
    """Pole-order calculus requires all twist exponents to vanish."""


class ConstituentsNotDistinct(ValueError):
    """The two degree-2 constituents of a lifted datum must be non-isomorphic."""


class InsufficientLocalData(ValueError):
    """A sampled place is missing local parameters."""


def inverse_char_id(cc: str) -> str:
    """Id of the inverse central character; the trivial character is '1'."""
    if cc == "1":
        return "1"
    return cc[1:] if cc.startswith("~") else "~" + cc


@dataclass(frozen=True, eq=False)
class CuspidalSymbol:
    """A formal cuspidal representation with sampled local Satake data."""

    id: str
    degree: int
    dual_id: str
    central_char_id: str
    local_params: Mapping[PlaceData, tuple[UnramChar, ...]]
    _registry: "SymbolRegistry | None" = field(default=None, repr=False)

    def __post_init__(self):
        if self.degree not in (1, 2, 3, 4):
            raise ValueError(f"degree must be in 1..4, got {self.degree}")
        frozen = {}
        for place, params in dict(self.local_params).items():
            params = tuple(as_char(x) for x in params)
            if len(params) != self.degree:
                raise ValueError(
                    f"symbol {self.id}: {len(params)} parameters at q={place.q}, "
                    f"expected {self.degree}"
                )
            frozen[place] = params
        object.__setattr__(self, "local_params", frozen)

    def __eq__(self, other):
        return isinstance(other, CuspidalSymbol) and self.id == other.id

    def __hash__(self):
        return hash(self.id)

    @property
    def is_self_dual(self) -> bool:
        return self.dual_id == self.id

    def dual(self) -> "CuspidalSymbol":
        if self.is_self_dual:
            return self
        if self._registry is None:
            raise ValueError(f"symbol {self.id} is not attached to a registry")
        return self._registry.get(self.dual_id)


def equivalent(a: CuspidalSymbol, b: CuspidalSymbol) -> bool:
    """Equivalence oracle: identity, or local agreement at all common places."""
    if a.id == b.id:
        return True
    if a.degree != b.degree:
        return False
    common = set(a.local_params) & set(b.local_params)
    if not common:
        return False
    return all(match_multisets(a.local_params[p], b.local_params[p]) for p in common)


class SymbolRegistry:
    """Append-only id -> symbol store; symbols are immutable once created."""

    def __init__(self):
        self._symbols: dict[str, CuspidalSymbol] = {}

    def __contains__(self, sid: str) -> bool:
        return sid in self._symbols

    def __iter__(self):
        return iter(self._symbols.values())

    def get(self, sid: str) -> CuspidalSymbol:
        return self._symbols[sid]

    def _insert(self, sym: CuspidalSymbol) -> CuspidalSymbol:
        if sym.id in self._symbols:
            raise ValueError(f"symbol id {sym.id!r} already registered")
        object.__setattr__(sym, "_registry", self)
        self._symbols[sym.id] = sym
        return sym

    def create(
        self,
        sid: str,
        degree: int,
        *,
        central_char: str = "1",
        self_dual: bool = False,
        dual_id: str | None = None,
        local: Mapping[PlaceData, Sequence] | None = None,
    ) -> CuspidalSymbol:
        """Create a symbol together with its contragredient.

        Unless ``self_dual`` is set, the dual symbol is materialized with the
        entrywise-inverse local multisets and the inverse central character.
        Self-dual creation requires every sampled multiset to be closed under
        inversion.
        """
        local = {p: tuple(as_char(x) for x in params) for p, params in (local or {}).items()}
        if self_dual:
            for place, params in local.items():
                if not match_multisets(params, [x.inverse() for x in params]):
                    raise ValueError(
                        f"symbol {sid}: local data at q={place.q} is not inverse-closed, "
                        "cannot be self-dual"
                    )
            return self._insert(CuspidalSymbol(sid, degree, sid, central_char, local))
        dual_id = dual_id or sid + "^"
        sym = CuspidalSymbol(sid, degree, dual_id, central_char, local)
        dual_local = {p: tuple(x.inverse() for x in params) for p, params in local.items()}
        dual = CuspidalSymbol(
            dual_id, degree, sid, inverse_char_id(central_char), dual_local
        )
        self._insert(sym)
        self._insert(dual)
        return sym


# ---------------------------------------------------------------------------
# Isobaric sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IsobaricRep:
    """Isobaric sum of twisted cuspidal symbols.

    Twist exponents are exact rationals and the unitary normalization
    ``sum(degree_i * r_i) == 0`` is enforced at construction.
    """

    terms: tuple[tuple[CuspidalSymbol, Fraction], ...]

    def __post_init__(self):
        terms = tuple((sym, Fraction(r)) for sym, r in self.terms)
        if not terms:
            raise ValueError("isobaric sum needs at least one term")
        if sum(sym.degree * r for sym, r in terms) != 0:
            raise ValueError("unitary normalization violated: sum(n_i * r_i) != 0")
        object.__setattr__(self, "terms", terms)

    @property
    def degree(self) -> int:
        return sum(sym.degree for sym, _ in self.terms)

    @property
    def constituents(self) -> tuple[CuspidalSymbol, ...]:
        return tuple(sym for sym, _ in self.terms)


def isobaric(symbols: Iterable[CuspidalSymbol]) -> IsobaricRep:
    """Untwisted isobaric sum of the given symbols."""
    return IsobaricRep(tuple((sym, Fraction(0)) for sym in symbols))


def dual(rep: IsobaricRep) -> IsobaricRep:
    """Termwise contragredient with negated twist exponents."""
    return IsobaricRep(tuple((sym.dual(), -r) for sym, r in rep.terms))


def reps_equivalent(r1: IsobaricRep, r2: IsobaricRep) -> bool:
    """Equality of isobaric sums up to reordering of terms."""
    if len(r1.terms) != len(r2.terms):
        return False
    remaining = list(r2.terms)
    for sym, r in r1.terms:
        for i, (other, rr) in enumerate(remaining):
            if r == rr and equivalent(sym, other):
                remaining.pop(i)
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class RSFactor:
    """One Rankin-Selberg factor of the bilinear expansion."""

    sigma: CuspidalSymbol
    tau: CuspidalSymbol
    shift: Fraction


def rs_factorization(r1: IsobaricRep, r2: IsobaricRep) -> list[RSFactor]:
    """Full bilinear expansion: one factor per constituent pair."""
    return [
        RSFactor(s1, s2, r + rr)
        for s1, r in r1.terms
        for s2, rr in r2.terms
    ]


@dataclass(frozen=True)
class PoleReport:
    """Exact pole order at s = 1 with one witness pair per unit of order."""

    order: int
    witnesses: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.order != len(self.witnesses):
            raise ValueError("order must equal the number of witnesses")


def pole_order_at_one(r1: IsobaricRep, r2: IsobaricRep) -> PoleReport:
    """Pole order of the pairing at s = 1 for unitary-normalized sums.

    A constituent pair (i, j) contributes a simple pole exactly when the
    j-th constituent of r2 is the contragredient of the i-th constituent of
    r1; the order is additive over pairs.
    """
    for rep in (r1, r2):
        if any(r != 0 for _, r in rep.terms):
            raise NotUnitaryNormalized("twist exponents must all vanish")
    witnesses = []
    for i, (s1, _) in enumerate(r1.terms):
        s1d = s1.dual()
        for j, (s2, _) in enumerate(r2.terms):
            if equivalent(s2, s1d):
                witnesses.append((i, j))
    return PoleReport(len(witnesses), tuple(witnesses))


# ---------------------------------------------------------------------------
# Transfer shapes
# ---------------------------------------------------------------------------

REASON_UNITARITY = "unitarity forces sum(n_i * r_i) = 0"
REASON_GL1_TWIST = (
    "n_t = 1: the twist by the degree-1 constituent is entire, "
    "but the shifted factor forces a pole"
)
REASON_CONTRAGREDIENT = (
    "n_t = 3: passing to contragredients reduces to the degree-1 contradiction"
)
REASON_NONZERO_TWIST = "n_t = 2: a pole at s = 1 forces the last twist exponent to vanish"
REASON_THREE_BLOCKS = (
    "t = 3: all twists are forced to zero, then the twist by the first "
    "constituent makes an entire L-function acquire a pole"
)


@dataclass(frozen=True)
class ShapeVerdict:
    admissible: bool
    reason: str | None = None


def validate_transfer_shape(shape: Sequence[tuple[int, Fraction]]) -> ShapeVerdict:
    """Decide whether an induction shape can carry a transfer of unitary data.

    ``shape`` is a list of (degree, twist) blocks with twists sorted
    descending and degrees summing to 4.  Only (4; 0) and (2, 2; 0, 0) are
    admissible; every other shape is rejected with the elimination reason.
    """
    blocks = [(int(n), Fraction(r)) for n, r in shape]
    if sum(n for n, _ in blocks) != 4:
        raise ValueError("degrees must sum to 4")
    rs = [r for _, r in blocks]
    if rs != sorted(rs, reverse=True):
        raise ValueError("twist exponents must be sorted descending")
    if sum(n * r for n, r in blocks) != 0:
        return ShapeVerdict(False, REASON_UNITARITY)
    t = len(blocks)
    degrees = sorted(n for n, _ in blocks)
    if t == 1:
        return ShapeVerdict(True)  # (4; 0), twist zero by unitarity
    if degrees == [2, 2] and all(r == 0 for r in rs):
        return ShapeVerdict(True)
    # The elimination walks the degree of the lowest-twist block; with ties,
    # a degree-1 block is preferred since the entire-twist argument applies.
    r_min = rs[-1]
    tied_degrees = {n for n, r in blocks if r == r_min}
    if 1 in tied_degrees:
        if t == 3 and all(r == 0 for r in rs):
            return ShapeVerdict(False, REASON_THREE_BLOCKS)
        return ShapeVerdict(False, REASON_GL1_TWIST)
    if 3 in tied_degrees:
        return ShapeVerdict(False, REASON_CONTRAGREDIENT)
    # lowest twist sits on a degree-2 block
    if r_min != 0:
        return ShapeVerdict(False, REASON_NONZERO_TWIST)
    return ShapeVerdict(False, REASON_THREE_BLOCKS)


# ---------------------------------------------------------------------------
# Descriptors and transfer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GSp4Descriptor:
    """Formal degree-4 datum, either lifted from a degree-2 pair or not.

    A lifted (``from_gso``) descriptor carries the two degree-2 symbols and
    the grossencharacter id they share as central character; both symbols
    must carry that central character and must not be isomorphic.
    """

    from_gso: bool
    central_char_id: str
    pair: tuple[CuspidalSymbol, CuspidalSymbol] | None = None
    gross_char_id: str | None = None
    cuspidal: CuspidalSymbol | None = None

    def __post_init__(self):
        if self.from_gso:
            if self.pair is None or self.gross_char_id is None:
                raise ValueError("lifted descriptor needs a symbol pair and a grossencharacter")
            p1, p2 = self.pair
            if p1.degree != 2 or p2.degree != 2:
                raise ValueError("lifted constituents must have degree 2")
            if (
                p1.central_char_id != self.gross_char_id
                or p2.central_char_id != self.gross_char_id
            ):
                raise CentralCharMismatch(
                    "central_char_compatibility: both constituents must carry the "
                    "grossencharacter as central character"
                )
            if equivalent(p1, p2):
                raise ConstituentsNotDistinct(
                    "distinct_constituents: the two constituents are isomorphic"
                )
        else:
            if self.cuspidal is None or self.cuspidal.degree != 4:
                raise ValueError("non-lifted descriptor needs a degree-4 cuspidal symbol")


def transfer(desc: GSp4Descriptor) -> IsobaricRep:
    """Transfer a descriptor to its degree-4 isobaric sum.

    A lifted descriptor transfers to the isobaric sum of its two degree-2
    constituents; otherwise the transfer is the single degree-4 cuspidal
    symbol.  Side conditions are available from transfer_conditions.
    """
    if desc.from_gso:
        return isobaric(desc.pair)
    return isobaric([desc.cuspidal])


def transfer_conditions(desc: GSp4Descriptor) -> tuple[str, ...]:
    """Recorded side conditions of the transfer, as constraint strings."""
    w = desc.central_char_id
    if desc.from_gso:
        p1, p2 = desc.pair
        return (
            f"{p1.id} ~ dual({p1.id}) (x) {w}",
            f"{p2.id} ~ dual({p2.id}) (x) {w}",
            f"{p1.id} !~ {p2.id}",
        )
    c = desc.cuspidal
    return (
        f"central_char({c.id}) = {w}^2",
        f"{c.id} ~ dual({c.id}) (x) {w}",
    )


@dataclass(frozen=True)
class CaseAnalysis:
    """Case label and pole report for a pair of descriptors."""

    label: str
    report: PoleReport


def jiang_case_analysis(d1: GSp4Descriptor, d2: GSp4Descriptor) -> CaseAnalysis:
    """Classify a descriptor pair and compute the pole order of the pairing.

    Labels: "1" (neither lifted; order 1 exactly when the transfers are
    contragredient), "2" (exactly one lifted; order 0), and for two lifted
    descriptors "3b" (order 2), "3c" (order 1) or "3a-excluded" (order 0;
    the configurations that would give order 3 or 4 cannot be built because
    constituents within a descriptor are distinct).
    """
    t1, t2 = transfer(d1), transfer(d2)
    report = pole_order_at_one(t1, t2)
    if not d1.from_gso and not d2.from_gso:
        label = "1"
    elif d1.from_gso != d2.from_gso:
        label = "2"
    else:
        label = {2: "3b", 1: "3c", 0: "3a-excluded"}[report.order]
    return CaseAnalysis(label, report)


# ---------------------------------------------------------------------------
# Association matching
# ---------------------------------------------------------------------------


def associate_match(
    list1: Sequence[CuspidalSymbol],
    list2: Sequence[CuspidalSymbol],
    sample: Iterable[PlaceData],
) -> tuple[int, ...] | None:
    """Match two cuspidal lists up to permutation from sampled local data.

    Returns phi with list2[j] equivalent to list1[phi[j]] (degrees match and
    local parameter multisets agree at every sampled place), or None when
    the lists are not associate.  When the pooled parameter multisets at
    any sampled place differ the verdict None is certain.  Missing local
    data at a sampled place raises InsufficientLocalData.
    """
    places = sorted(set(sample), key=lambda p: p.q)
    if not places:
        raise InsufficientLocalData("need at least one sampled place")
    for sym in list(list1) + list(list2):
        for place in places:
            if place not in sym.local_params:
                raise InsufficientLocalData(
                    f"symbol {sym.id} has no local data at q={place.q}"
                )
    if len(list1) != len(list2):
        return None
    for place in places:
        pooled1 = [x for sym in list1 for x in sym.local_params[place]]
        pooled2 = [x for sym in list2 for x in sym.local_params[place]]
        if not match_multisets(pooled1, pooled2):
            return None

    def compatible(j: int, i: int) -> bool:
        a, b = list2[j], list1[i]
        if a.degree != b.degree:
            return False
        return all(
            match_multisets(a.local_params[p], b.local_params[p]) for p in places
        )

    n = len(list1)
    assignment: list[int] = []
    used = [False] * n

    def search(j: int) -> bool:
        if j == n:
            return True
        for i in range(n):
            if not used[i] and compatible(j, i):
                used[i] = True
                assignment.append(i)
                if search(j + 1):
                    return True
                assignment.pop()
                used[i] = False
        return False

    if not search(0):
        return None
    return tuple(assignment)


# ---------------------------------------------------------------------------
# JSON documents
# ---------------------------------------------------------------------------


def _params_to_json(params: Iterable[UnramChar]) -> list:
    return [[c.value.real, c.value.imag] for c in params]


def registry_to_json(registry: SymbolRegistry) -> list[dict]:
    out = []
    for sym in registry:
        out.append(
            {
                "id": sym.id,
                "degree": sym.degree,
                "dual": sym.dual_id,
                "central_char": sym.central_char_id,
                "local": {
                    str(place.q): _params_to_json(params)
                    for place, params in sorted(sym.local_params.items(), key=lambda kv: kv[0].q)
                },
            }
        )
    return out


def registry_from_json(symbols: Sequence[dict]) -> SymbolRegistry:
    """Rebuild a registry from its document form.

    Undeclared duals are materialized with entrywise-inverse local data;
    declared duals are checked for mutually inverse multisets at shared
    places and backfilled at places only one side declares.  Self-dual
    symbols must carry inverse-closed multisets.
    """
    raw = {doc["id"]: dict(doc) for doc in symbols}
    locals_: dict[str, dict] = {}
    for sid, doc in raw.items():
        locals_[sid] = {
            PlaceData(int(q)): tuple(as_char(complex(re, im)) for re, im in params)
            for q, params in (doc.get("local") or {}).items()
        }
    for sid, doc in list(raw.items()):
        dual_id = doc["dual"]
        if dual_id not in raw:
            raw[dual_id] = {
                "id": dual_id,
                "degree": doc["degree"],
                "dual": sid,
                "central_char": inverse_char_id(doc.get("central_char", "1")),
            }
            locals_[dual_id] = {}
    for sid, doc in raw.items():
        dual_id = doc["dual"]
        if dual_id == sid:
            for place, params in locals_[sid].items():
                if not match_multisets(params, [x.inverse() for x in params]):
                    raise ValueError(
                        f"self-dual symbol {sid} has non-inverse-closed data at q={place.q}"
                    )
            continue
        other = raw.get(dual_id)
        if other is None or other["dual"] != sid:
            raise ValueError(f"dual of dual of {sid} is not {sid}")
        mine, theirs = locals_[sid], locals_[dual_id]
        for place, params in mine.items():
            inv = tuple(x.inverse() for x in params)
            if place in theirs:
                if not match_multisets(theirs[place], inv):
                    raise ValueError(
                        f"local data of {sid} and {dual_id} at q={place.q} "
                        "are not entrywise inverse"
                    )
            else:
                theirs[place] = inv
    registry = SymbolRegistry()
    for sid, doc in raw.items():
        registry._insert(
            CuspidalSymbol(
                sid, int(doc["degree"]), doc["dual"],
                doc.get("central_char", "1"), locals_[sid],
            )
        )
    return registry


def descriptor_from_json(doc: dict, registry: SymbolRegistry) -> GSp4Descriptor:
    terms = doc.get("isobaric") or [{"term": t, "r": "0"} for t in doc.get("terms", [])]
    if any(Fraction(str(item.get("r", "0"))) != 0 for item in terms):
        raise NotUnitaryNormalized(
            "unitary_normalization: descriptor terms must carry twist 0"
        )
    symbols = [registry.get(item["term"]) for item in terms]
    from_gso = bool(doc.get("from_gso"))
    if from_gso:
        if len(symbols) != 2:
            raise ValueError("lifted descriptor needs exactly two terms")
        gross = doc.get("gross_char") or symbols[0].central_char_id
        omega = doc.get("omega") or gross
        return GSp4Descriptor(True, omega, pair=(symbols[0], symbols[1]), gross_char_id=gross)
    if len(symbols) != 1:
        raise ValueError("non-lifted descriptor needs exactly one degree-4 term")
    omega = doc.get("omega") or "1"
    return GSp4Descriptor(False, omega, cuspidal=symbols[0])


def load_document(doc: dict | str) -> tuple[SymbolRegistry, list[GSp4Descriptor]]:
    """Load a representation document: symbol table plus descriptors.

    Accepts either the flat single-descriptor form (top-level ``isobaric``
    and ``from_gso`` keys) or a ``descriptors`` array for multi-descriptor
    files.
    """
    if isinstance(doc, str):
        doc = json.loads(doc)
    registry = registry_from_json(doc.get("symbols", []))
    descriptors = []
    if "descriptors" in doc:
        for item in doc["descriptors"]:
            descriptors.append(descriptor_from_json(item, registry))
    elif "isobaric" in doc or "terms" in doc:
        descriptors.append(descriptor_from_json(doc, registry))
    return registry, descriptors
