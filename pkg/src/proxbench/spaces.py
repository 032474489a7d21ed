"""Finite proximity spaces: ground sets, subsets and nearness relations.

Subsets of a ground set are characteristic bitmasks (bit i = labels[i]),
so a ground set of n elements has subset masks 0 .. 2**n - 1 and the
integer value of a mask doubles as its position in every report ordering.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

MAX_GROUND = 16

# caps for exhaustive audits; overruns degrade to "skipped", never truncate
PAIR_SCAN_CAP = 12
TRIPLE_SCAN_CAP = 8


def bit_indices(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def lsb_index(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


@dataclass(frozen=True)
class GroundSet:
    """Ordered carrier of at most 16 distinct labels."""

    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        if not 1 <= len(self.labels) <= MAX_GROUND:
            raise ValueError(
                f"ground set must have 1..{MAX_GROUND} elements, got {len(self.labels)}"
            )
        if len(set(self.labels)) != len(self.labels):
            dup = next(l for l in self.labels if self.labels.count(l) > 1)
            raise ValueError(f"duplicate element label {dup!r}")

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown element label {label!r}") from None

    def mask_of(self, labels) -> int:
        mask = 0
        for label in labels:
            mask |= 1 << self.index(label)
        return mask

    def labels_of(self, mask: int) -> tuple[str, ...]:
        return tuple(self.labels[i] for i in bit_indices(mask))

    def subset(self, labels=()) -> "Subset":
        return Subset(self, self.mask_of(labels))

    def subset_from_mask(self, mask: int) -> "Subset":
        return Subset(self, mask)


@dataclass(frozen=True)
class Subset:
    """Immutable subset of a ground set, stored as a characteristic mask."""

    ground: GroundSet
    mask: int

    def __post_init__(self):
        if not 0 <= self.mask <= self.ground.full_mask:
            raise ValueError(f"mask {self.mask:#x} outside ground set of size {self.ground.size}")

    @property
    def members(self) -> tuple[str, ...]:
        return self.ground.labels_of(self.mask)

    @property
    def is_empty(self) -> bool:
        return self.mask == 0

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, label: str) -> bool:
        return bool(self.mask >> self.ground.index(label) & 1)

    def __iter__(self):
        return iter(self.members)

    def _check_same_ground(self, other: "Subset"):
        if self.ground != other.ground:
            raise ValueError("subsets belong to different ground sets")

    def union(self, other: "Subset") -> "Subset":
        self._check_same_ground(other)
        return Subset(self.ground, self.mask | other.mask)

    def intersection(self, other: "Subset") -> "Subset":
        self._check_same_ground(other)
        return Subset(self.ground, self.mask & other.mask)

    def difference(self, other: "Subset") -> "Subset":
        self._check_same_ground(other)
        return Subset(self.ground, self.mask & ~other.mask)

    def complement(self) -> "Subset":
        return Subset(self.ground, self.ground.full_mask & ~self.mask)

    def issubset(self, other: "Subset") -> bool:
        self._check_same_ground(other)
        return self.mask & ~other.mask == 0

    __or__ = union
    __and__ = intersection
    __sub__ = difference

    def __repr__(self):
        return "{" + ",".join(self.members) + "}"


@dataclass(frozen=True)
class Witness:
    """Minimal concrete counterexample attached to a failed check."""

    kind: str
    subsets: tuple[Subset, ...]
    map_desc: str = ""
    note: str = ""

    def to_doc(self) -> dict:
        doc = {"kind": self.kind}
        if self.map_desc:
            doc["map"] = self.map_desc
        doc["subsets"] = [list(s.members) for s in self.subsets]
        if self.note:
            doc["note"] = self.note
        return doc

    def __repr__(self):
        parts = [self.kind] + [repr(s) for s in self.subsets]
        if self.map_desc:
            parts.append(self.map_desc)
        return "Witness(" + ", ".join(parts) + ")"


class ProximityRelation:
    """Base for nearness relations.

    A relation answers near(A, B) for subsets of its ground set; the empty
    set is far from everything.  Instances never mutate after construction.
    """

    ground: GroundSet
    name: str

    @property
    def representation(self) -> str:
        raise NotImplementedError

    def near_masks(self, a: int, b: int) -> bool:
        raise NotImplementedError

    def near(self, a: Subset, b: Subset) -> bool:
        if a.ground != self.ground or b.ground != self.ground:
            raise ValueError("subsets and relation have mismatched ground sets")
        return self.near_masks(a.mask, b.mask)


@dataclass(frozen=True, repr=False)
class PointToleranceRelation(ProximityRelation):
    """Relation generated by a symmetric reflexive element tolerance.

    tol[i] is the mask of elements tolerant to element i; subsets are near
    when some pair of their points is tolerant.
    """

    ground: GroundSet
    tol: tuple[int, ...]
    name: str = "point-tolerance"

    def __post_init__(self):
        n = self.ground.size
        object.__setattr__(self, "tol", tuple(int(t) for t in self.tol))
        if len(self.tol) != n:
            raise ValueError("tolerance matrix does not match ground size")
        for i, row in enumerate(self.tol):
            if not 0 <= row <= self.ground.full_mask:
                raise ValueError(f"tolerance row {i} out of range")
            if not row >> i & 1:
                raise ValueError(f"tolerance matrix not reflexive at {self.ground.labels[i]!r}")
        for i in range(n):
            for j in range(n):
                if (self.tol[i] >> j & 1) != (self.tol[j] >> i & 1):
                    raise ValueError(
                        f"tolerance matrix not symmetric at "
                        f"({self.ground.labels[i]!r},{self.ground.labels[j]!r})"
                    )

    @property
    def representation(self) -> str:
        return "point-tolerance"

    def reach(self, mask: int) -> int:
        out = 0
        for i in bit_indices(mask):
            out |= self.tol[i]
        return out

    def near_masks(self, a: int, b: int) -> bool:
        if a == 0 or b == 0:
            return False
        return self.reach(a) & b != 0

    def __repr__(self):
        return f"PointToleranceRelation({self.name!r} on {self.ground.labels})"


@dataclass(frozen=True, repr=False)
class TableRelation(ProximityRelation):
    """Relation given by an explicit set of near subset-mask pairs."""

    ground: GroundSet
    pairs: frozenset
    name: str = "table"

    def __post_init__(self):
        object.__setattr__(
            self, "pairs", frozenset((int(a), int(b)) for a, b in self.pairs)
        )
        for a, b in self.pairs:
            if a == 0 or b == 0:
                raise ValueError("table relation may not declare the empty set near")
            if a > self.ground.full_mask or b > self.ground.full_mask:
                raise ValueError("table pair outside ground set")

    @property
    def representation(self) -> str:
        return "table"

    def near_masks(self, a: int, b: int) -> bool:
        if a == 0 or b == 0:
            return False
        return (a, b) in self.pairs

    def __repr__(self):
        return f"TableRelation({self.name!r}, {len(self.pairs)} pairs on {self.ground.labels})"


@dataclass(frozen=True, repr=False)
class ProductRelation(ProximityRelation):
    """Nearness on subsets of a product carrier, decided by projections.

    S is near T when both coordinate projections are near in their factor
    relations; on rectangles A x B this is the usual conjunction rule.
    """

    ground: GroundSet
    factors: tuple
    name: str = "product"

    @property
    def representation(self) -> str:
        return "product"

    @property
    def factor_sizes(self) -> tuple[int, int]:
        return (self.factors[0].ground.size, self.factors[1].ground.size)

    def project(self, mask: int) -> tuple[int, int]:
        nx, ny = self.factor_sizes
        p1 = p2 = 0
        for k in bit_indices(mask):
            p1 |= 1 << (k // ny)
            p2 |= 1 << (k % ny)
        return p1, p2

    def rectangle_mask(self, a: int, b: int) -> int:
        nx, ny = self.factor_sizes
        mask = 0
        for i in bit_indices(a):
            mask |= b << (i * ny)
        return mask

    def near_masks(self, a: int, b: int) -> bool:
        if a == 0 or b == 0:
            return False
        a1, a2 = self.project(a)
        b1, b2 = self.project(b)
        return self.factors[0].near_masks(a1, b1) and self.factors[1].near_masks(a2, b2)

    def __repr__(self):
        return f"ProductRelation({self.factors[0].name!r} x {self.factors[1].name!r})"


def product_ground(gx: GroundSet, gy: GroundSet) -> GroundSet:
    labels = tuple(f"({a},{b})" for a in gx.labels for b in gy.labels)
    return GroundSet(labels)


def product_relation(rel_x: ProximityRelation, rel_y: ProximityRelation) -> ProductRelation:
    """Product handle recording both factors; nearness via projections."""
    ground = product_ground(rel_x.ground, rel_y.ground)
    return ProductRelation(
        ground, (rel_x, rel_y), name=f"product({rel_x.name},{rel_y.name})"
    )


def point_product_relation(
    rel_x: PointToleranceRelation, rel_y: PointToleranceRelation
) -> PointToleranceRelation:
    """Point-generated product: (a,b) tolerant to (c,d) iff a~c and b~d."""
    gx, gy = rel_x.ground, rel_y.ground
    ground = product_ground(gx, gy)
    ny = gy.size
    tol = []
    for i in range(gx.size):
        for j in range(ny):
            row = 0
            for k in bit_indices(rel_x.tol[i]):
                row |= rel_y.tol[j] << (k * ny)
            tol.append(row)
    return PointToleranceRelation(
        ground, tuple(tol), name=f"product({rel_x.name},{rel_y.name})"
    )


def _normalize_features(ground: GroundSet, probe: dict, what: str) -> tuple:
    feats = []
    arity = None
    for label in ground.labels:
        if label not in probe:
            raise ValueError(f"{what} map missing element {label!r}")
        value = probe[label]
        if isinstance(value, (list, tuple)):
            feat = tuple(value)
        else:
            feat = (value,)
        feat = tuple(Fraction(v) if not isinstance(v, Fraction) else v for v in feat)
        if arity is None:
            arity = len(feat)
        elif len(feat) != arity:
            raise ValueError(f"{what} tuples must have uniform arity (element {label!r})")
        feats.append(feat)
    extra = set(probe) - set(ground.labels)
    if extra:
        raise ValueError(f"{what} map names unknown element {sorted(extra)[0]!r}")
    return tuple(feats)


def overlap_relation(ground: GroundSet) -> PointToleranceRelation:
    """Sets are near exactly when they intersect."""
    tol = tuple(1 << i for i in range(ground.size))
    return PointToleranceRelation(ground, tol, name="overlap")


def containment_relation(ground: GroundSet) -> TableRelation:
    """W near K iff W is a subset of K; kept explicit so audits see it as-is."""
    if ground.size > PAIR_SCAN_CAP:
        raise ValueError(
            f"containment relation materializes 3^n pairs; ground size "
            f"{ground.size} exceeds cap {PAIR_SCAN_CAP}"
        )
    pairs = []
    for b in range(1, 1 << ground.size):
        # enumerate nonempty submasks of b
        a = b
        while a:
            pairs.append((a, b))
            a = (a - 1) & b
    return TableRelation(ground, frozenset(pairs), name="containment")


def probe_equality_relation(
    ground: GroundSet, probe: dict, name: str = "probe-equality"
) -> PointToleranceRelation:
    feats = _normalize_features(ground, probe, "probe")
    n = ground.size
    tol = [0] * n
    for i in range(n):
        for j in range(n):
            if feats[i] == feats[j]:
                tol[i] |= 1 << j
    return PointToleranceRelation(ground, tuple(tol), name=name)


def gap_metric_relation(
    ground: GroundSet, coords: dict, epsilon
) -> PointToleranceRelation:
    """Elements are tolerant when their coordinate distance is <= epsilon."""
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    feats = _normalize_features(ground, coords, "coordinate")
    n = ground.size
    eps2 = Fraction(epsilon) ** 2
    tol = [0] * n
    for i in range(n):
        for j in range(n):
            d2 = sum((u - v) ** 2 for u, v in zip(feats[i], feats[j]))
            if d2 <= eps2:
                tol[i] |= 1 << j
    return PointToleranceRelation(ground, tuple(tol), name="gap-metric")


def complete_to_cech(ground: GroundSet, basis) -> PointToleranceRelation:
    """Smallest point-generated relation making every basis pair near.

    Tolerance: a ~ b iff a = b or some basis pair (P, Q) has a in P and
    b in Q (either orientation).  The result always satisfies the four
    basic nearness axioms and contains every basis pair.
    """
    tol = [1 << i for i in range(ground.size)]
    for p, q in basis:
        pm = p.mask if isinstance(p, Subset) else ground.mask_of(p)
        qm = q.mask if isinstance(q, Subset) else ground.mask_of(q)
        if pm == 0 or qm == 0:
            raise ValueError("empty subset in completion basis")
        for i in bit_indices(pm):
            tol[i] |= qm
        for j in bit_indices(qm):
            tol[j] |= pm
    return PointToleranceRelation(ground, tuple(tol), name="table(completed)")


def build_relation(
    ground: GroundSet,
    kind: str,
    *,
    probe: dict | None = None,
    coords: dict | None = None,
    epsilon=None,
    pairs=None,
    complete: bool = False,
    name: str | None = None,
) -> ProximityRelation:
    """Build an immutable relation from a generator description.

    Kinds: overlap | containment | probe-equality | gap-metric | table.
    Parameters not belonging to the requested kind are rejected.
    """
    allowed = {
        "overlap": set(),
        "containment": set(),
        "probe-equality": {"probe"},
        "gap-metric": {"coords", "epsilon"},
        "table": {"pairs", "complete"},
    }
    if kind not in allowed:
        raise ValueError(f"unknown relation kind {kind!r}")
    given = {
        key
        for key, value in {
            "probe": probe,
            "coords": coords,
            "epsilon": epsilon,
            "pairs": pairs,
            "complete": complete or None,
        }.items()
        if value is not None
    }
    stray = given - allowed[kind]
    if stray:
        raise ValueError(f"parameter {sorted(stray)[0]!r} not valid for kind {kind!r}")

    if kind == "overlap":
        rel = overlap_relation(ground)
    elif kind == "containment":
        rel = containment_relation(ground)
    elif kind == "probe-equality":
        if probe is None:
            raise ValueError("probe-equality relation requires a probe map")
        rel = probe_equality_relation(ground, probe)
    elif kind == "gap-metric":
        if coords is None or epsilon is None:
            raise ValueError("gap-metric relation requires coords and epsilon")
        rel = gap_metric_relation(ground, coords, epsilon)
    else:
        pair_masks = []
        for p, q in pairs or ():
            pm = p.mask if isinstance(p, Subset) else ground.mask_of(p)
            qm = q.mask if isinstance(q, Subset) else ground.mask_of(q)
            pair_masks.append((pm, qm))
        if complete:
            rel = complete_to_cech(
                ground, [(Subset(ground, a), Subset(ground, b)) for a, b in pair_masks]
            )
        else:
            for pm, qm in pair_masks:
                if pm == 0 or qm == 0:
                    raise ValueError("table relation may not declare the empty set near")
            rel = TableRelation(ground, frozenset(pair_masks), name="table")
    if name is not None:
        object.__setattr__(rel, "name", name)
    return rel


def near(rel: ProximityRelation, a: Subset, b: Subset) -> bool:
    """Query surface: true iff a is near b under rel."""
    return rel.near(a, b)


def closure(rel: ProximityRelation, a: Subset) -> Subset:
    """All points whose singleton is near a; empty set closes to itself."""
    if a.ground != rel.ground:
        raise ValueError("subset and relation have mismatched ground sets")
    if a.mask == 0:
        return a
    mask = 0
    for i in range(rel.ground.size):
        if rel.near_masks(1 << i, a.mask):
            mask |= 1 << i
    return Subset(rel.ground, mask)


def closure_table(rel: ProximityRelation) -> list[int]:
    """closure mask for every subset mask, using only singleton queries."""
    n = rel.ground.size
    size = 1 << n
    rows = []
    for i in range(n):
        row = 0
        for a in range(1, size):
            if rel.near_masks(1 << i, a):
                row |= 1 << a
        rows.append(row)
    out = [0] * size
    for a in range(1, size):
        m = 0
        for i in range(n):
            if rows[i] >> a & 1:
                m |= 1 << i
        out[a] = m
    return out


@dataclass(frozen=True)
class TopologyReport:
    """Closed/open families induced by a relation, with stability flags."""

    closed_family: tuple[Subset, ...]
    open_family: tuple[Subset, ...]
    is_union_stable: bool
    is_intersection_stable: bool


def closed_family(rel: ProximityRelation) -> TopologyReport:
    """Fixed points of closure over all subsets, plus their complements.

    Stability of the closed family under pairwise union/intersection is
    reported, not assumed.
    """
    n = rel.ground.size
    if n > PAIR_SCAN_CAP:
        raise ValueError(f"closed-family enumeration capped at ground size {PAIR_SCAN_CAP}")
    table = closure_table(rel)
    closed = [a for a in range(1 << n) if table[a] == a]
    closed_set = set(closed)
    union_ok = all((a | b) in closed_set for a in closed for b in closed)
    inter_ok = all((a & b) in closed_set for a in closed for b in closed)
    full = rel.ground.full_mask
    return TopologyReport(
        closed_family=tuple(Subset(rel.ground, a) for a in closed),
        open_family=tuple(Subset(rel.ground, full & ~a) for a in closed),
        is_union_stable=union_ok,
        is_intersection_stable=inter_ok,
    )


def restrict_subspace(rel: ProximityRelation, s: Subset) -> ProximityRelation:
    """Relation induced on the nonempty sub-carrier s, preserving verdicts."""
    if s.ground != rel.ground:
        raise ValueError("subset and relation have mismatched ground sets")
    if s.mask == 0:
        raise ValueError("cannot restrict to the empty carrier")
    keep = bit_indices(s.mask)
    sub_ground = GroundSet(tuple(rel.ground.labels[i] for i in keep))
    reindex = {old: new for new, old in enumerate(keep)}

    def squeeze(mask: int) -> int:
        out = 0
        for i in bit_indices(mask):
            out |= 1 << reindex[i]
        return out

    if isinstance(rel, PointToleranceRelation):
        tol = tuple(squeeze(rel.tol[i] & s.mask) for i in keep)
        return PointToleranceRelation(sub_ground, tol, name=f"{rel.name}|{len(keep)}")
    if isinstance(rel, TableRelation):
        pairs = frozenset(
            (squeeze(a), squeeze(b))
            for a, b in rel.pairs
            if a & ~s.mask == 0 and b & ~s.mask == 0
        )
        return TableRelation(sub_ground, pairs, name=f"{rel.name}|{len(keep)}")
    # generic fallback: materialize the restricted table
    if len(keep) > PAIR_SCAN_CAP:
        raise ValueError("restriction of a generator relation capped at ground size 12")
    pairs = set()
    expand = {new: old for old, new in reindex.items()}

    def unsqueeze(mask: int) -> int:
        out = 0
        for i in bit_indices(mask):
            out |= 1 << expand[i]
        return out

    size = 1 << len(keep)
    for a in range(1, size):
        ua = unsqueeze(a)
        for b in range(1, size):
            if rel.near_masks(ua, unsqueeze(b)):
                pairs.add((a, b))
    return TableRelation(sub_ground, frozenset(pairs), name=f"{rel.name}|{len(keep)}")


@dataclass(frozen=True)
class AxiomVerdict:
    axiom: str
    verdict: str  # pass | fail | skipped
    witness: Witness | None = None
    reason: str = ""


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of the nearness-axiom audit, one verdict per axiom."""

    entries: tuple[AxiomVerdict, ...]

    def entry(self, axiom: str) -> AxiomVerdict:
        for e in self.entries:
            if e.axiom == axiom:
                return e
        raise KeyError(axiom)

    @property
    def cech_passed(self) -> bool:
        names = ("symmetry", "overlap-implies-near", "union-additivity", "empty-set-far")
        return all(self.entry(n).verdict == "pass" for n in names)

    @property
    def all_passed(self) -> bool:
        return all(e.verdict != "fail" for e in self.entries)


def audit_axioms(rel: ProximityRelation) -> AxiomReport:
    """Exhaustively audit the nearness axioms of a relation.

    The four basic axioms (symmetry, overlap-implies-near, union
    additivity in both arguments, empty-set-far) are scanned over all
    nonempty subset pairs at ground size <= 12.  The Lodato and Efremovic
    conditions enumerate triples / separating subsets and are only run at
    ground size <= 8; beyond the caps those entries are marked skipped.
    Fail verdicts carry the lexicographically minimal witness.
    """
    from . import scan

    return scan.audit_axioms_impl(rel)
