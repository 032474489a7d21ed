"""Finite rings, fields and modules as Cayley tables, with exhaustive audits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .spaces import GroundSet, Subset, bit_indices


@dataclass(frozen=True)
class FiniteRing:
    """Two Cayley tables over an indexed carrier.

    Construction does not audit the ring axioms (the workbench also hosts
    deliberately broken tables); run audit_ring for verdicts.  Tables hold
    element indices, row = left operand.
    """

    ground: GroundSet
    add: tuple[tuple[int, ...], ...]
    mul: tuple[tuple[int, ...], ...]
    zero: int
    one: int | None = None
    name: str = "ring"

    @property
    def size(self) -> int:
        return self.ground.size

    def add_elem(self, a: int, b: int) -> int:
        return self.add[a][b]

    def mul_elem(self, a: int, b: int) -> int:
        return self.mul[a][b]

    def neg_elem(self, a: int) -> int:
        for x in range(self.size):
            if self.add[a][x] == self.zero:
                return x
        raise ValueError(f"element {self.ground.labels[a]!r} has no additive inverse")

    def neg_table(self) -> tuple[int, ...]:
        return tuple(self.neg_elem(a) for a in range(self.size))

    def label(self, i: int) -> str:
        return self.ground.labels[i]


def _index_tables(elements, table, what: str):
    ground = GroundSet(tuple(elements))
    n = ground.size
    if len(table) != n:
        raise ValueError(f"{what} table has {len(table)} rows for {n} elements")
    rows = []
    for i, row in enumerate(table):
        if len(row) != n:
            raise ValueError(f"{what} table row {ground.labels[i]!r} has {len(row)} entries")
        out = []
        for j, entry in enumerate(row):
            if isinstance(entry, int):
                if not 0 <= entry < n:
                    raise ValueError(
                        f"{what} table entry at ({ground.labels[i]!r},{ground.labels[j]!r}) "
                        f"is out of range: {entry}"
                    )
                out.append(entry)
            else:
                try:
                    out.append(ground.index(entry))
                except KeyError:
                    raise ValueError(
                        f"{what} table entry at ({ground.labels[i]!r},{ground.labels[j]!r}) "
                        f"is not an element: {entry!r}"
                    ) from None
        rows.append(tuple(out))
    return ground, tuple(rows)


def build_ring(elements, add, mul, zero, one=None, name: str = "ring") -> FiniteRing:
    """Assemble a FiniteRing from label (or index) matrices, unaudited.

    zero/one are labels (or indices); one may be omitted for rings
    without unity.
    """
    ground, add_t = _index_tables(elements, add, "add")
    ground2, mul_t = _index_tables(elements, mul, "mul")
    if ground != ground2:
        raise ValueError("add and mul tables were given different element lists")

    def locate(value, what):
        if value is None:
            return None
        if isinstance(value, int):
            if not 0 <= value < ground.size:
                raise ValueError(f"{what} index {value} out of range")
            return value
        try:
            return ground.index(value)
        except KeyError:
            raise ValueError(f"{what} {value!r} is not an element") from None

    return FiniteRing(ground, add_t, mul_t, locate(zero, "zero"), locate(one, "one"), name)


@dataclass(frozen=True)
class RingAxiomVerdict:
    name: str
    verdict: str  # pass | fail | skipped
    witness: tuple[str, ...] | None = None
    informational: bool = False
    reason: str = ""


@dataclass(frozen=True)
class RingAuditReport:
    entries: tuple[RingAxiomVerdict, ...]

    def entry(self, name: str) -> RingAxiomVerdict:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    @property
    def is_ring(self) -> bool:
        return all(e.verdict == "pass" or e.informational or e.verdict == "skipped"
                   for e in self.entries)

    @property
    def first_failure(self) -> RingAxiomVerdict | None:
        for e in self.entries:
            if e.verdict == "fail" and not e.informational:
                return e
        return None


def _scan_assoc(table, labels):
    n = len(labels)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if table[table[a][b]][c] != table[a][table[b][c]]:
                    return (labels[a], labels[b], labels[c])
    return None


def _scan_comm(table, labels):
    n = len(labels)
    for a in range(n):
        for b in range(a + 1, n):
            if table[a][b] != table[b][a]:
                return (labels[a], labels[b])
    return None


def audit_group_table(table, labels, identity: int):
    """Verdicts for a single Cayley table as a group: associativity,
    declared identity, inverses.  Returns list of RingAxiomVerdict."""
    n = len(labels)
    out = []
    w = _scan_assoc(table, labels)
    out.append(RingAxiomVerdict("associativity", "fail" if w else "pass", w))
    idw = None
    for a in range(n):
        if table[identity][a] != a or table[a][identity] != a:
            idw = (labels[identity], labels[a])
            break
    out.append(RingAxiomVerdict("identity", "fail" if idw else "pass", idw))
    invw = None
    for a in range(n):
        if not any(table[a][x] == identity and table[x][a] == identity for x in range(n)):
            invw = (labels[a],)
            break
    out.append(RingAxiomVerdict("inverses", "fail" if invw else "pass", invw))
    return out


def audit_ring(ring: FiniteRing) -> RingAuditReport:
    """Exhaustive ring-axiom audit, O(n^3) triple scans, minimal witnesses."""
    labels = ring.ground.labels
    n = ring.size
    add, mul = ring.add, ring.mul
    entries = []

    w = _scan_assoc(add, labels)
    entries.append(RingAxiomVerdict("add-associativity", "fail" if w else "pass", w))
    w = _scan_comm(add, labels)
    entries.append(RingAxiomVerdict("add-commutativity", "fail" if w else "pass", w))
    w = None
    for a in range(n):
        if add[ring.zero][a] != a or add[a][ring.zero] != a:
            w = (labels[ring.zero], labels[a])
            break
    entries.append(RingAxiomVerdict("add-identity", "fail" if w else "pass", w))
    w = None
    for a in range(n):
        if not any(add[a][x] == ring.zero and add[x][a] == ring.zero for x in range(n)):
            w = (labels[a],)
            break
    entries.append(RingAxiomVerdict("add-inverses", "fail" if w else "pass", w))
    w = _scan_assoc(mul, labels)
    entries.append(RingAxiomVerdict("mul-associativity", "fail" if w else "pass", w))
    w = None
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if mul[a][add[b][c]] != add[mul[a][b]][mul[a][c]]:
                    w = (labels[a], labels[b], labels[c])
                    break
            if w:
                break
        if w:
            break
    entries.append(RingAxiomVerdict("left-distributivity", "fail" if w else "pass", w))
    w = None
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if mul[add[a][b]][c] != add[mul[a][c]][mul[b][c]]:
                    w = (labels[a], labels[b], labels[c])
                    break
            if w:
                break
        if w:
            break
    entries.append(RingAxiomVerdict("right-distributivity", "fail" if w else "pass", w))

    if ring.one is None:
        entries.append(
            RingAxiomVerdict("unity", "skipped", None, reason="no unity declared")
        )
    else:
        w = None
        for a in range(n):
            if mul[ring.one][a] != a or mul[a][ring.one] != a:
                w = (labels[ring.one], labels[a])
                break
        entries.append(RingAxiomVerdict("unity", "fail" if w else "pass", w))

    w = _scan_comm(mul, labels)
    entries.append(
        RingAxiomVerdict("mul-commutativity", "fail" if w else "pass", w, informational=True)
    )
    return RingAuditReport(tuple(entries))


_SET_OPS = ("add", "mul", "sub", "neg")


def set_arithmetic(ring: FiniteRing, w: Subset, k: Subset | None, op: str) -> Subset:
    """Elementwise image set: W op K over all element pairs.

    op is one of add | mul | sub | neg; neg is unary (k ignored) and
    sub is implemented as w + neg(k).
    """
    if op not in _SET_OPS:
        raise ValueError(f"unknown set operation {op!r}")
    if w.ground != ring.ground:
        raise ValueError("subset and ring have mismatched ground sets")
    if op == "neg":
        mask = 0
        for i in bit_indices(w.mask):
            mask |= 1 << ring.neg_elem(i)
        return Subset(ring.ground, mask)
    if k is None:
        raise ValueError(f"operation {op!r} needs a second subset")
    if k.ground != ring.ground:
        raise ValueError("subset and ring have mismatched ground sets")
    if op == "sub":
        k = set_arithmetic(ring, k, None, "neg")
        op = "add"
    table = ring.add if op == "add" else ring.mul
    mask = 0
    for i in bit_indices(w.mask):
        row = table[i]
        for j in bit_indices(k.mask):
            mask |= 1 << row[j]
    return Subset(ring.ground, mask)


class UnitsReport(NamedTuple):
    units: Subset
    right_invertible: Subset
    left_invertible: Subset


def units_and_inverses(ring: FiniteRing) -> UnitsReport:
    """Right/left invertible elements and their intersection (the units)."""
    if ring.one is None:
        raise ValueError("units require a ring with unity")
    n = ring.size
    right = 0
    left = 0
    for a in range(n):
        if any(ring.mul[a][x] == ring.one for x in range(n)):
            right |= 1 << a
        if any(ring.mul[x][a] == ring.one for x in range(n)):
            left |= 1 << a
    g = ring.ground
    return UnitsReport(Subset(g, right & left), Subset(g, right), Subset(g, left))


def inverse_of(ring: FiniteRing, a: int) -> int | None:
    """Two-sided multiplicative inverse of element index a, if any."""
    if ring.one is None:
        return None
    for x in range(ring.size):
        if ring.mul[a][x] == ring.one and ring.mul[x][a] == ring.one:
            return x
    return None


def is_field(ring: FiniteRing) -> tuple[bool, str]:
    """Fields are audited rings with unity != zero whose units are exactly
    the nonzero elements."""
    report = audit_ring(ring)
    bad = report.first_failure
    if bad:
        return False, f"ring axiom {bad.name} fails at {bad.witness}"
    if ring.one is None:
        return False, "no unity declared"
    if ring.one == ring.zero:
        return False, "unity equals zero"
    units = units_and_inverses(ring).units.mask
    nonzero = ring.ground.full_mask & ~(1 << ring.zero)
    if units != nonzero:
        missing = nonzero & ~units
        label = ring.ground.labels[bit_indices(missing)[0]]
        return False, f"element {label!r} has no inverse"
    return True, ""


def direct_product_ring(r1: FiniteRing, r2: FiniteRing) -> FiniteRing:
    """Componentwise tables on the product carrier; unity iff both have one."""
    n1, n2 = r1.size, r2.size
    if n1 * n2 > 16:
        raise ValueError(f"product carrier size {n1 * n2} exceeds ground cap 16")
    labels = tuple(f"({a},{b})" for a in r1.ground.labels for b in r2.ground.labels)

    def pack(i, j):
        return i * n2 + j

    size = n1 * n2
    add = [[0] * size for _ in range(size)]
    mul = [[0] * size for _ in range(size)]
    for i1 in range(n1):
        for j1 in range(n2):
            a = pack(i1, j1)
            for i2 in range(n1):
                for j2 in range(n2):
                    b = pack(i2, j2)
                    add[a][b] = pack(r1.add[i1][i2], r2.add[j1][j2])
                    mul[a][b] = pack(r1.mul[i1][i2], r2.mul[j1][j2])
    one = None
    if r1.one is not None and r2.one is not None:
        one = pack(r1.one, r2.one)
    return FiniteRing(
        GroundSet(labels),
        tuple(tuple(r) for r in add),
        tuple(tuple(r) for r in mul),
        pack(r1.zero, r2.zero),
        one,
        name=f"{r1.name}x{r2.name}",
    )


@dataclass(frozen=True)
class FiniteModule:
    """Abelian carrier with a ring action, audited at construction."""

    ring: FiniteRing
    carrier: GroundSet
    madd: tuple[tuple[int, ...], ...]
    action: tuple[tuple[int, ...], ...]
    mzero: int
    name: str = "module"

    @property
    def size(self) -> int:
        return self.carrier.size

    def mneg_elem(self, e: int) -> int:
        for x in range(self.size):
            if self.madd[e][x] == self.mzero:
                return x
        raise ValueError(f"carrier element {self.carrier.labels[e]!r} has no additive inverse")

    def mneg_table(self) -> tuple[int, ...]:
        return tuple(self.mneg_elem(e) for e in range(self.size))


class ModuleLawError(ValueError):
    def __init__(self, law: str, witness: tuple[str, ...]):
        self.law = law
        self.witness = witness
        super().__init__(f"module law {law} fails at {witness}")


def build_module(ring: FiniteRing, carrier, madd, action, name: str = "module") -> FiniteModule:
    """Construct a module and audit its laws exhaustively.

    action rows are indexed by ring elements, columns by carrier elements.
    Raises ModuleLawError with a witness on the first violated law.
    """
    cg, madd_t = _index_tables(carrier, madd, "madd")
    if len(action) != ring.size:
        raise ValueError(f"action table has {len(action)} rows for ring size {ring.size}")
    act_rows = []
    for r, row in enumerate(action):
        if len(row) != cg.size:
            raise ValueError(f"action row {ring.label(r)!r} has {len(row)} entries")
        out = []
        for e, entry in enumerate(row):
            if isinstance(entry, int):
                if not 0 <= entry < cg.size:
                    raise ValueError(f"action entry at ({ring.label(r)!r},{cg.labels[e]!r}) out of range")
                out.append(entry)
            else:
                try:
                    out.append(cg.index(entry))
                except KeyError:
                    raise ValueError(
                        f"action entry at ({ring.label(r)!r},{cg.labels[e]!r}) "
                        f"is not a carrier element: {entry!r}"
                    ) from None
        act_rows.append(tuple(out))
    act = tuple(act_rows)

    mzero = None
    for e in range(cg.size):
        if all(madd_t[e][x] == x and madd_t[x][e] == x for x in range(cg.size)):
            mzero = e
            break
    if mzero is None:
        raise ModuleLawError("madd-identity", ())
    for verdict in audit_group_table(madd_t, cg.labels, mzero):
        if verdict.verdict == "fail":
            raise ModuleLawError(f"madd-{verdict.name}", verdict.witness)
    w = _scan_comm(madd_t, cg.labels)
    if w:
        raise ModuleLawError("madd-commutativity", w)

    rl, cl = ring.ground.labels, cg.labels
    for r in range(ring.size):
        for s in range(ring.size):
            for e in range(cg.size):
                if act[ring.add[r][s]][e] != madd_t[act[r][e]][act[s][e]]:
                    raise ModuleLawError("scalar-distributivity", (rl[r], rl[s], cl[e]))
                if act[ring.mul[r][s]][e] != act[r][act[s][e]]:
                    raise ModuleLawError("action-associativity", (rl[r], rl[s], cl[e]))
    for r in range(ring.size):
        for e in range(cg.size):
            for f in range(cg.size):
                if act[r][madd_t[e][f]] != madd_t[act[r][e]][act[r][f]]:
                    raise ModuleLawError("vector-distributivity", (rl[r], cl[e], cl[f]))
    if ring.one is not None:
        for e in range(cg.size):
            if act[ring.one][e] != e:
                raise ModuleLawError("unit-action", (rl[ring.one], cl[e]))

    return FiniteModule(ring, cg, madd_t, act, mzero, name)


def direct_product_module(m1: FiniteModule, m2: FiniteModule) -> FiniteModule:
    """Product carrier with componentwise addition and diagonal action."""
    if m1.ring is not m2.ring and m1.ring != m2.ring:
        raise ValueError("module product requires modules over the same ring")
    n1, n2 = m1.size, m2.size
    if n1 * n2 > 16:
        raise ValueError(f"product carrier size {n1 * n2} exceeds ground cap 16")
    labels = tuple(f"({a},{b})" for a in m1.carrier.labels for b in m2.carrier.labels)

    def pack(i, j):
        return i * n2 + j

    size = n1 * n2
    madd = [[0] * size for _ in range(size)]
    for i1 in range(n1):
        for j1 in range(n2):
            for i2 in range(n1):
                for j2 in range(n2):
                    madd[pack(i1, j1)][pack(i2, j2)] = pack(m1.madd[i1][i2], m2.madd[j1][j2])
    action = [
        [pack(m1.action[r][i], m2.action[r][j]) for i in range(n1) for j in range(n2)]
        for r in range(m1.ring.size)
    ]
    return build_module(m1.ring, labels, madd, action, name=f"{m1.name}x{m2.name}")


def ring_as_module(ring: FiniteRing) -> FiniteModule:
    """A ring acting on itself by left multiplication."""
    return build_module(
        ring, ring.ground.labels, ring.add, ring.mul, name=f"{ring.name}-self"
    )


def ring_zn(n: int) -> FiniteRing:
    """Integers modulo n with the usual tables."""
    if not 1 <= n <= 16:
        raise ValueError(f"ring size must be 1..16, got {n}")
    labels = tuple(str(k) for k in range(n))
    add = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    mul = tuple(tuple((a * b) % n for b in range(n)) for a in range(n))
    one = 1 % n if n > 1 else None
    return FiniteRing(GroundSet(labels), add, mul, 0, one, name=f"Z{n}")


def gf(p: int) -> FiniteRing:
    """Prime field of order p (only prime moduli are built in)."""
    if p < 2 or any(p % d == 0 for d in range(2, int(math.isqrt(p)) + 1)):
        raise ValueError(f"gf requires a prime modulus, got {p}")
    ring = ring_zn(p)
    return FiniteRing(ring.ground, ring.add, ring.mul, ring.zero, ring.one, name=f"GF({p})")


def boolean_ring(m: int) -> FiniteRing:
    """Power set of m atoms under symmetric difference and intersection."""
    if not 1 <= m <= 4:
        raise ValueError(f"boolean ring supports 1..4 atoms, got {m}")
    atoms = "abcd"[:m]
    size = 1 << m
    labels = tuple(
        "".join(atoms[i] for i in range(m) if s >> i & 1) or "0" for s in range(size)
    )
    add = tuple(tuple(a ^ b for b in range(size)) for a in range(size))
    mul = tuple(tuple(a & b for b in range(size)) for a in range(size))
    return FiniteRing(GroundSet(labels), add, mul, 0, size - 1, name=f"boolean-{m}")
