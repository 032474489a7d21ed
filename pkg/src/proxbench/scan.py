"""Enumeration core: bitmask subset spaces realized as numpy arrays.

Every scan enumerates tuples in ascending mask order (characteristic
vector read as an integer, element 0 least significant) and returns the
first violation, so reported witnesses are lexicographically minimal no
matter how the work is partitioned.  Matrices are indexed by subset mask;
row/column 0 is the empty set and is identically False.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .spaces import (
    AxiomReport,
    AxiomVerdict,
    PointToleranceRelation,
    ProductRelation,
    ProximityRelation,
    Subset,
    TableRelation,
    Witness,
    PAIR_SCAN_CAP,
    TRIPLE_SCAN_CAP,
    bit_indices,
)

# row-block size for building 2^n x 2^n matrices without large temporaries
_CHUNK = 1 << 9


def subset_image_map(f, n: int) -> np.ndarray:
    """img[S] = mask of {f(i) : i in S}, for all 2**n subset masks S.

    Built by the standard DP: masks in [2^i, 2^(i+1)) are (bit i) + m with
    m < 2^i, so each block is the previous prefix OR'd with bit f(i).
    """
    img = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        step = 1 << i
        img[step : 2 * step] = img[:step] | (1 << int(f[i]))
    return img


def pair_image_map(table, nl: int, nr: int) -> np.ndarray:
    """img[A, B] = mask of {table[a][b] : a in A, b in B}."""
    rows = [subset_image_map(table[a], nr) for a in range(nl)]
    out = np.zeros((1 << nl, 1 << nr), dtype=np.int64)
    for i in range(nl):
        step = 1 << i
        out[step : 2 * step] = out[:step] | rows[i]
    return out


def reach_array(tol, n: int) -> np.ndarray:
    """reach[A] = union of tolerance rows over elements of A."""
    reach = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        step = 1 << i
        reach[step : 2 * step] = reach[:step] | int(tol[i])
    return reach


def projection_maps(nx: int, ny: int) -> tuple[np.ndarray, np.ndarray]:
    """Coordinate projections for product-carrier subsets (index i*ny+j)."""
    total = nx * ny
    p1 = np.zeros(1 << total, dtype=np.int64)
    p2 = np.zeros(1 << total, dtype=np.int64)
    for k in range(total):
        step = 1 << k
        p1[step : 2 * step] = p1[:step] | (1 << (k // ny))
        p2[step : 2 * step] = p2[:step] | (1 << (k % ny))
    return p1, p2


def near_matrix(rel: ProximityRelation) -> np.ndarray:
    """Full near matrix of a relation as bool (2^n, 2^n)."""
    n = rel.ground.size
    if n > PAIR_SCAN_CAP:
        raise ValueError(
            f"near matrix needs 4**{n} cells; ground size exceeds cap {PAIR_SCAN_CAP}"
        )
    size = 1 << n
    if isinstance(rel, PointToleranceRelation):
        reach = reach_array(rel.tol, n)
        masks = np.arange(size, dtype=np.int64)
        out = np.empty((size, size), dtype=bool)
        for lo in range(0, size, _CHUNK):
            hi = min(lo + _CHUNK, size)
            out[lo:hi] = (reach[lo:hi, None] & masks[None, :]) != 0
        out[0, :] = False
        out[:, 0] = False
        return out
    if isinstance(rel, TableRelation):
        out = np.zeros((size, size), dtype=bool)
        if rel.pairs:
            pairs = np.array(sorted(rel.pairs), dtype=np.int64)
            out[pairs[:, 0], pairs[:, 1]] = True
        return out
    if isinstance(rel, ProductRelation):
        nx, ny = rel.factor_sizes
        p1, p2 = projection_maps(nx, ny)
        n1 = near_matrix(rel.factors[0])
        n2 = near_matrix(rel.factors[1])
        out = n1[np.ix_(p1, p1)] & n2[np.ix_(p2, p2)]
        out[0, :] = False
        out[:, 0] = False
        return out
    # generic relation: evaluate pointwise
    out = np.zeros((size, size), dtype=bool)
    for a in range(1, size):
        for b in range(1, size):
            out[a, b] = rel.near_masks(a, b)
    return out


def is_point_generated(rel: ProximityRelation) -> bool:
    if isinstance(rel, PointToleranceRelation):
        return True
    if isinstance(rel, ProductRelation):
        return all(is_point_generated(f) for f in rel.factors)
    return False


def point_tolerance_rows(rel: ProximityRelation) -> tuple[int, ...]:
    """Element tolerance rows of a point-generated relation (products
    expand to tolerance on packed pairs)."""
    if isinstance(rel, PointToleranceRelation):
        return rel.tol
    if isinstance(rel, ProductRelation):
        tx = point_tolerance_rows(rel.factors[0])
        ty = point_tolerance_rows(rel.factors[1])
        ny = rel.factor_sizes[1]
        rows = []
        for i in range(len(tx)):
            for j in range(ny):
                row = 0
                for k in bit_indices(tx[i]):
                    row |= ty[j] << (k * ny)
                rows.append(row)
        return tuple(rows)
    raise TypeError("relation is not point-generated")


def _first_true(viol: np.ndarray) -> int | None:
    idx = int(np.argmax(viol))
    if viol.ravel()[idx]:
        return idx
    return None


def scan_unary(nx: np.ndarray, ny: np.ndarray, img: np.ndarray):
    """First (W, K) with near_X(W, K) but not near_Y(img[W], img[K])."""
    m = nx.shape[0] - 1
    sub = img[1:]
    ok = ny[np.ix_(sub, sub)]
    viol = nx[1:, 1:] & ~ok
    idx = _first_true(viol)
    if idx is None:
        return None
    return (idx // m + 1, idx % m + 1)


def scan_unary_points(tol_x, tol_y, f):
    """Element-pair form of the unary scan for point-generated relations:
    first (x, y) with x ~ y but not f(x) ~ f(y)."""
    n = len(tol_x)
    for x in range(n):
        ok = 0
        row = tol_y[f[x]]
        for y in range(n):
            if row >> f[y] & 1:
                ok |= 1 << y
        viol = tol_x[x] & ~ok
        if viol:
            return (x, (viol & -viol).bit_length() - 1)
    return None


def scan_rect(
    nl: np.ndarray,
    nr: np.ndarray,
    nout: np.ndarray,
    pairimg: np.ndarray,
    workers: int = 1,
):
    """First rectangle-pair violation of binary continuity.

    Quantifies quadruples (A1, B1, A2, B2) in lexicographic mask order:
    near_L(A1, A2) and near_R(B1, B2) must imply
    near_out(pairimg[A1,B1], pairimg[A2,B2]).
    """
    sl = nl.shape[0]
    sr = nr.shape[0]
    img_flat = pairimg[1:, 1:].ravel()
    any_l = nl[:, 1:].any(axis=1)
    any_r = nr[:, 1:].any(axis=1)
    ok_cache: dict[int, np.ndarray] = {}

    def ok_for(p: int) -> np.ndarray:
        got = ok_cache.get(p)
        if got is None:
            got = nout[p].take(img_flat).reshape(sl - 1, sr - 1)
            ok_cache[p] = got
        return got

    def scan_range(a_lo: int, a_hi: int):
        for a1 in range(a_lo, a_hi):
            if not any_l[a1]:
                continue
            row_l = nl[a1, 1:]
            for b1 in range(1, sr):
                if not any_r[b1]:
                    continue
                ok = ok_for(int(pairimg[a1, b1]))
                viol = row_l[:, None] & nr[b1, 1:][None, :] & ~ok
                idx = _first_true(viol)
                if idx is not None:
                    return (a1, b1, idx // (sr - 1) + 1, idx % (sr - 1) + 1)
        return None

    if workers <= 1:
        return scan_range(1, sl)
    bounds = np.linspace(1, sl, workers + 1).astype(int)
    chunks = [(int(lo), int(hi)) for lo, hi in zip(bounds, bounds[1:]) if lo < hi]
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        found = list(pool.map(lambda c: scan_range(*c), chunks))
    hits = [f for f in found if f is not None]
    return min(hits) if hits else None


def scan_rect_points(tol_l, tol_r, tol_out, table):
    """Element-quadruple form of the rectangle scan for point-generated
    relations: first (a1, b1, a2, b2) with a1~a2, b1~b2 but not
    table[a1][b1] ~ table[a2][b2].

    For point-generated relations this is equivalent in verdict to the
    full rectangle scan: a near witness pair of points inside the factor
    sets transports to a near pair inside the image sets.
    """
    nl, nr = len(tol_l), len(tol_r)
    # ok_bits[p][a2] = mask over b2 of table[a2][b2] tolerant to p
    ok_bits = {}
    for a1 in range(nl):
        for b1 in range(nr):
            p = table[a1][b1]
            per_a2 = ok_bits.get(p)
            if per_a2 is None:
                row_p = tol_out[p]
                per_a2 = []
                for a2 in range(nl):
                    bits = 0
                    row_t = table[a2]
                    for b2 in range(nr):
                        if row_p >> row_t[b2] & 1:
                            bits |= 1 << b2
                    per_a2.append(bits)
                ok_bits[p] = per_a2
            cand = tol_l[a1]
            while cand:
                a2 = (cand & -cand).bit_length() - 1
                cand &= cand - 1
                viol = tol_r[b1] & ~per_a2[a2]
                if viol:
                    return (a1, b1, a2, (viol & -viol).bit_length() - 1)
    return None


def scan_triple_lodato(n_mat: np.ndarray, n: int):
    """First (A, B, C) with A near B, every point of B near C, A far C."""
    size = 1 << n
    masks = np.arange(size, dtype=np.int64)
    pts = np.zeros(size, dtype=np.int64)
    for i in range(n):
        pts |= (n_mat[1 << i, :].astype(np.int64)) << i
    # subs[B, C] = B nonempty and every point of B near C
    subs = (masks[:, None] & ~pts[None, :]) == 0
    subs[0, :] = False
    subs[:, 0] = False
    for a in range(1, size):
        viol = n_mat[a][:, None] & subs & ~n_mat[a][None, :]
        idx = _first_true(viol)
        if idx is not None:
            return (a, idx // size, idx % size)
    return None


def scan_efremovic(n_mat: np.ndarray, n: int):
    """First far pair (A, B) with no subset E satisfying A far E and
    complement(E) far B.  E ranges over all subsets, the empty set being
    far from everything."""
    size = 1 << n
    far = ~n_mat
    far[0, :] = True
    far[:, 0] = True
    comp = np.arange(size)[::-1]  # complement of mask m is (size-1) ^ m
    far_comp = far[comp, :]
    sep = (far.astype(np.uint8) @ far_comp.astype(np.uint8)) > 0
    viol = ~n_mat[1:, 1:] & ~sep[1:, 1:]
    idx = _first_true(viol)
    if idx is None:
        return None
    return (idx // (size - 1) + 1, idx % (size - 1) + 1)


def audit_axioms_impl(rel: ProximityRelation) -> AxiomReport:
    n = rel.ground.size
    entries = []

    def subset(mask):
        return Subset(rel.ground, mask)

    if n > PAIR_SCAN_CAP:
        reason = f"ground size {n} exceeds pair-scan cap {PAIR_SCAN_CAP}"
        for name in ("symmetry", "overlap-implies-near", "union-additivity", "empty-set-far"):
            entries.append(AxiomVerdict(name, "skipped", reason=reason))
        for name in ("lodato", "efremovic"):
            entries.append(
                AxiomVerdict(
                    name, "skipped", reason=f"ground size {n} exceeds triple-scan cap {TRIPLE_SCAN_CAP}"
                )
            )
        return AxiomReport(tuple(entries))

    size = 1 << n
    nm = near_matrix(rel)
    masks = np.arange(size, dtype=np.int64)

    # symmetry: first (A, B) where near(A, B) != near(B, A)
    asym = nm != nm.T
    idx = _first_true(asym)
    if idx is None:
        entries.append(AxiomVerdict("symmetry", "pass"))
    else:
        a, b = idx // size, idx % size
        note = "near one way, far the other"
        entries.append(
            AxiomVerdict(
                "symmetry", "fail", Witness("pair", (subset(a), subset(b)), note=note)
            )
        )

    # overlap-implies-near: A & B != 0 must force near(A, B)
    over = (masks[:, None] & masks[None, :]) != 0
    idx = _first_true(over & ~nm)
    if idx is None:
        entries.append(AxiomVerdict("overlap-implies-near", "pass"))
    else:
        a, b = idx // size, idx % size
        entries.append(
            AxiomVerdict(
                "overlap-implies-near",
                "fail",
                Witness("pair", (subset(a), subset(b)), note="sets overlap but are far"),
            )
        )

    # union additivity, both arguments.  Over a finite carrier additivity
    # is equivalent to nearness being decided by single points: near(A, B)
    # iff some singleton of B is near A (and symmetrically in the first
    # argument), which keeps the scan pairwise.
    singles = [1 << i for i in range(n)]
    prow = np.zeros(size, dtype=np.int64)  # points b with near(A, {b})
    pcol = np.zeros(size, dtype=np.int64)  # points a with near({a}, B)
    for i, s in enumerate(singles):
        prow |= nm[:, s].astype(np.int64) << i
        pcol |= nm[s, :].astype(np.int64) << i
    exp2 = (prow[:, None] & masks[None, :]) != 0
    exp1 = (masks[:, None] & pcol[None, :]) != 0
    bad = (nm != exp2) | (nm != exp1)
    bad[0, :] = False
    bad[:, 0] = False
    idx = _first_true(bad)
    if idx is None:
        entries.append(AxiomVerdict("union-additivity", "pass"))
    else:
        a, b = idx // size, idx % size
        if nm[a, b] != exp2[a, b]:
            arg = "second"
            direction = "near the union" if nm[a, b] else "far from the union"
            other = "far from every singleton part" if nm[a, b] else "near a singleton part"
        else:
            arg = "first"
            direction = "near the union" if nm[a, b] else "far from the union"
            other = (
                "no singleton of the first argument is near"
                if nm[a, b]
                else "a singleton of the first argument is near"
            )
        entries.append(
            AxiomVerdict(
                "union-additivity",
                "fail",
                Witness(
                    "pair",
                    (subset(a), subset(b)),
                    note=f"additivity breaks in the {arg} argument: {direction}, {other}",
                ),
            )
        )

    # empty-set-far
    bad_empty = None
    for b in range(size):
        if rel.near_masks(0, b):
            bad_empty = (0, b)
            break
        if rel.near_masks(b, 0):
            bad_empty = (b, 0)
            break
    if bad_empty is None:
        entries.append(AxiomVerdict("empty-set-far", "pass"))
    else:
        entries.append(
            AxiomVerdict(
                "empty-set-far",
                "fail",
                Witness("pair", (subset(bad_empty[0]), subset(bad_empty[1]))),
            )
        )

    if n > TRIPLE_SCAN_CAP:
        reason = f"ground size {n} exceeds triple-scan cap {TRIPLE_SCAN_CAP}"
        entries.append(AxiomVerdict("lodato", "skipped", reason=reason))
        entries.append(AxiomVerdict("efremovic", "skipped", reason=reason))
        return AxiomReport(tuple(entries))

    hit = scan_triple_lodato(nm, n)
    if hit is None:
        entries.append(AxiomVerdict("lodato", "pass"))
    else:
        a, b, c = hit
        entries.append(
            AxiomVerdict(
                "lodato",
                "fail",
                Witness(
                    "triple",
                    (subset(a), subset(b), subset(c)),
                    note="A near B and every point of B near C, yet A far C",
                ),
            )
        )

    hit = scan_efremovic(nm, n)
    if hit is None:
        entries.append(AxiomVerdict("efremovic", "pass"))
    else:
        a, b = hit
        entries.append(
            AxiomVerdict(
                "efremovic",
                "fail",
                Witness(
                    "pair",
                    (subset(a), subset(b)),
                    note=f"far pair with no separating subset among all {size} candidates",
                ),
            )
        )
    return AxiomReport(tuple(entries))
