"""Two-layer hierarchical placement delivery arrays.

An HPDA couples a mirror placement grid (F x K1 of star/null) with K1 user
blocks (each an F x K2 placement delivery array).  The multicast ids split
into ``s_m`` (served from mirror caches alone) and per-block sets derived by
scanning; conditions B1-B4 tie the two layers together so that every user can
decode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import IO, Union

from .pda import (
    STAR,
    Cell,
    Pda,
    PdaFormatError,
    Violation,
    column_partition,
    mn_pda,
    pda_shift,
    star_rows,
    verify_pda,
)

MirrorCell = Union[str, None]


@dataclass(frozen=True)
class MirrorPlacement:
    """F x K1 grid of STAR/None recording which packet rows each mirror caches."""

    grid: tuple[tuple[MirrorCell, ...], ...]

    def __post_init__(self) -> None:
        grid = tuple(tuple(row) for row in self.grid)
        if not grid or not grid[0]:
            raise ValueError("mirror grid must be nonempty")
        width = len(grid[0])
        for j, row in enumerate(grid, start=1):
            if len(row) != width:
                raise ValueError(f"mirror row {j} has {len(row)} entries, expected {width}")
            for cell in row:
                if cell is not None and cell != STAR:
                    raise ValueError(f"mirror row {j} holds invalid cell {cell!r}")
        object.__setattr__(self, "grid", grid)

    @property
    def f(self) -> int:
        return len(self.grid)

    @property
    def k1(self) -> int:
        return len(self.grid[0])

    def is_star(self, j: int, k1: int) -> bool:
        """Star test at 1-based (row, mirror)."""
        return self.grid[j - 1][k1 - 1] == STAR

    def column_stars(self, k1: int) -> int:
        return sum(1 for row in self.grid if row[k1 - 1] == STAR)


@dataclass(frozen=True)
class HpdaReport:
    valid: bool
    violations: tuple[Violation, ...]


@dataclass(frozen=True)
class SchemeLoads:
    """Exact per-layer loads and memory ratios of an F-division scheme."""

    r1: Fraction
    r2: Fraction
    f: int
    m1_ratio: Fraction
    m2_ratio: Fraction


@dataclass(frozen=True)
class Hpda:
    """Mirror placement plus K1 user blocks with declared (K1, K2, F, Z1, Z2).

    ``s_m`` holds the ids delivered from mirror caches alone; ``s_k`` is always
    recomputed from the block grids so a stale declaration cannot leak into
    delivery.
    """

    k1: int
    k2: int
    f: int
    z1: int
    z2: int
    mirror: MirrorPlacement
    blocks: tuple[Pda, ...]
    s_m: frozenset[int]
    s_k: tuple[frozenset[int], ...] = field(init=False)

    def __post_init__(self) -> None:
        if self.k1 < 1 or self.k2 < 1 or self.f < 1:
            raise ValueError("K1, K2 and F must be positive")
        if len(self.blocks) != self.k1:
            raise ValueError(f"expected {self.k1} blocks, got {len(self.blocks)}")
        if self.mirror.f != self.f or self.mirror.k1 != self.k1:
            raise ValueError(
                f"mirror grid is {self.mirror.f}x{self.mirror.k1}, expected {self.f}x{self.k1}"
            )
        for i, block in enumerate(self.blocks, start=1):
            if block.f != self.f or block.k != self.k2:
                raise ValueError(
                    f"block {i} is {block.f}x{block.k}, expected {self.f}x{self.k2}"
                )
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "s_m", frozenset(self.s_m))
        object.__setattr__(
            self, "s_k", tuple(block.integer_set() for block in self.blocks)
        )

    def union_integers(self) -> frozenset[int]:
        return frozenset().union(*self.s_k)

    def block_entry(self, k1: int, j: int, k2: int) -> Cell:
        """Cell of block k1 at 1-based (row, user column)."""
        return self.blocks[k1 - 1].grid[j - 1][k2 - 1]


def _occurrence_map(h: Hpda) -> dict[int, list[tuple[int, int, int]]]:
    """id -> [(mirror, row, user column)] over all blocks, 1-based."""
    occ: dict[int, list[tuple[int, int, int]]] = {}
    for g, block in enumerate(h.blocks, start=1):
        for j, row in enumerate(block.grid, start=1):
            for c, cell in enumerate(row, start=1):
                if cell != STAR:
                    occ.setdefault(cell, []).append((g, j, c))
    return occ


def verify_hpda(h: Hpda) -> HpdaReport:
    """Check B1-B4 against the grids.

    B1: every mirror column has Z1 stars.  B2: every block is a valid
    (K2, F, Z2, |s_k|) placement delivery array.  B3: every id in ``s_m``
    occurs in exactly one block and only at rows the owning mirror caches.
    B4: ids shared across blocks imply mirror stars wherever the same id's
    column re-enters another block's rows.
    """
    violations: list[Violation] = []
    for k1 in range(1, h.k1 + 1):
        stars = h.mirror.column_stars(k1)
        if stars != h.z1:
            violations.append(
                Violation("B1", (k1,), f"mirror column {k1} has {stars} stars, expected {h.z1}")
            )
    for k1, block in enumerate(h.blocks, start=1):
        if block.z != h.z2:
            violations.append(
                Violation("B2", (k1,), f"block {k1} declares Z={block.z}, expected {h.z2}")
            )
        report = verify_pda(block)
        for v in report.violations:
            violations.append(
                Violation("B2", (k1, *v.coords), f"block {k1}: {v.condition}: {v.message}")
            )
    occ = _occurrence_map(h)
    for s in sorted(h.s_m):
        cells = occ.get(s, [])
        owners = {g for g, _, _ in cells}
        if len(owners) != 1:
            violations.append(
                Violation(
                    "B3",
                    (s,),
                    f"mirror-only id {s} occurs in {len(owners)} blocks, expected exactly 1",
                )
            )
        for g, j, c in cells:
            if not h.mirror.is_star(j, g):
                violations.append(
                    Violation(
                        "B3",
                        (g, j, c),
                        f"mirror-only id {s} at block {g} row {j} lacks a mirror star",
                    )
                )
    for s, cells in occ.items():
        owners = {g for g, _, _ in cells}
        if len(owners) < 2:
            continue
        for (g1, j1, c1), (g2, j2, c2) in combinations(cells, 2):
            if g1 == g2:
                continue
            if h.block_entry(g1, j2, c1) != STAR and not h.mirror.is_star(j2, g1):
                violations.append(
                    Violation(
                        "B4",
                        (g1, j2, c1),
                        f"id {s}: block {g1} row {j2} is an integer but mirror {g1} "
                        f"misses row {j2}",
                    )
                )
            if h.block_entry(g2, j1, c2) != STAR and not h.mirror.is_star(j1, g2):
                violations.append(
                    Violation(
                        "B4",
                        (g2, j1, c2),
                        f"id {s}: block {g2} row {j1} is an integer but mirror {g2} "
                        f"misses row {j1}",
                    )
                )
    return HpdaReport(valid=not violations, violations=tuple(violations))


def build_grouping(k1: int, k2: int, t: int) -> Hpda:
    """Group the columns of a k1*k2-user MN array into k1 mirror blocks.

    A block's all-star rows become that mirror's cached rows.  The stars of
    those rows are then re-labelled with fresh multicast ids so the mirrors,
    not the server, deliver them: blocks in ascending order, star rows top to
    bottom, columns left to right, ids running S+1, S+2, ...  Requires
    k2 < t < k1*k2.
    """
    k = k1 * k2
    if not k2 < t < k:
        raise ValueError(f"t must satisfy {k2} < t < {k}, got {t}")
    q = mn_pda(k, t)
    blocks_q = column_partition(q, k1)
    block_star_rows = [star_rows(b) for b in blocks_q]

    z1 = math.comb(k - k2, t - k2)
    assert all(len(rows) == z1 for rows in block_star_rows)
    starred_sets = [set(rows) for rows in block_star_rows]
    mirror = MirrorPlacement(
        grid=tuple(
            tuple(STAR if (j + 1) in starred else None for starred in starred_sets)
            for j in range(q.f)
        )
    )

    next_id = q.s + 1
    blocks = []
    for g, bq in enumerate(blocks_q):
        rows = [list(row) for row in bq.grid]
        for j in block_star_rows[g]:
            for c in range(k2):
                rows[j - 1][c] = next_id
                next_id += 1
        distinct = len({cell for row in rows for cell in row if cell != STAR})
        blocks.append(
            Pda(k=k2, f=q.f, z=q.z - z1, s=distinct, grid=tuple(tuple(r) for r in rows))
        )
    s_m = frozenset(range(q.s + 1, next_id))
    assert len(s_m) == k1 * k2 * z1

    h = Hpda(
        k1=k1,
        k2=k2,
        f=q.f,
        z1=z1,
        z2=q.z - z1,
        mirror=mirror,
        blocks=tuple(blocks),
        s_m=s_m,
    )
    _assert_grouping_sets(h, q.s, t)
    return h


def _assert_grouping_sets(h: Hpda, s: int, t: int) -> None:
    """Scanned per-block id sets must match their closed forms."""
    k = h.k1 * h.k2
    indexer_ranks = {
        sub: i for i, sub in enumerate(combinations(range(1, k + 1), t + 1), start=1)
    }
    expected_size = h.k2 * h.z1 + s - math.comb(k - h.k2, t + 1)
    for g in range(1, h.k1 + 1):
        group = set(range((g - 1) * h.k2 + 1, g * h.k2 + 1))
        inherited = {
            rank for sub, rank in indexer_ranks.items() if group.intersection(sub)
        }
        fresh_lo = s + (g - 1) * h.k2 * h.z1
        fresh = set(range(fresh_lo + 1, fresh_lo + h.k2 * h.z1 + 1))
        assert h.s_k[g - 1] == frozenset(inherited | fresh)
        assert len(h.s_k[g - 1]) == expected_size


def grouping_params(k1: int, k2: int, t: int) -> tuple[SchemeLoads, int, int]:
    """Closed-form (loads, Z1, Z2) of the grouping construction at (k1, k2, t)."""
    k = k1 * k2
    if not k2 < t < k:
        raise ValueError(f"t must satisfy {k2} < t < {k}, got {t}")
    f = math.comb(k, t)
    z1 = math.comb(k - k2, t - k2)
    z2 = math.comb(k - 1, t - 1) - z1
    r1 = Fraction(k - t, t + 1)
    r2 = r1 - Fraction(math.comb(k - k2, t + 1), f) + Fraction(k2 * z1, f)
    loads = SchemeLoads(
        r1=r1,
        r2=r2,
        f=f,
        m1_ratio=Fraction(z1, f),
        m2_ratio=Fraction(t, k) - Fraction(z1, f),
    )
    return loads, z1, z2


def _require_contiguous_alphabet(name: str, p: Pda) -> None:
    ints = p.integer_set()
    if ints != frozenset(range(1, p.s + 1)):
        raise ValueError(f"{name} array must use the integer alphabet [1..{p.s}]")


def _star_orders(p: Pda) -> dict[tuple[int, int], int]:
    """(column, row) -> 1-based order of the star down its column, 0-based indices."""
    orders = {}
    for c in range(p.k):
        seen = 0
        for j in range(p.f):
            if p.grid[j][c] == STAR:
                seen += 1
                orders[(c, j)] = seen
    return orders


def _inner_shift(outer: Pda, c: int, j: int, orders: dict[tuple[int, int], int]) -> int:
    """Shift applied to the inner array when it replaces outer cell (j, c), 0-based.

    Integer cells s reuse slot s-1; star cells take fresh slots laid out after
    all S1 integer slots, ordered by column and then by the star's position
    down that column.
    """
    cell = outer.grid[j][c]
    if cell == STAR:
        return c * outer.z + orders[(c, j)] - 1 + outer.s
    return cell - 1


def build_hybrid(outer: Pda, inner: Pda) -> Hpda:
    """Compose an outer array (mirror layer) with an inner array (user layer).

    The mirror placement is the outer star pattern with every row repeated F2
    times.  Block k1 stacks F1 shifted copies of the inner array, one per
    outer cell in column k1: copies replacing equal outer integers share ids
    (the server multicasts them), copies replacing outer stars get fresh id
    ranges (their packets sit in mirror k1's cache).  Both inputs must verify
    and use contiguous integer alphabets [1..S].
    """
    for name, p in (("outer", outer), ("inner", inner)):
        report = verify_pda(p)
        if not report.valid:
            first = report.violations[0]
            raise ValueError(f"{name} array is not a valid PDA: {first.condition}: {first.message}")
        _require_contiguous_alphabet(name, p)

    f1, z1, s1 = outer.f, outer.z, outer.s
    f2, z2, s2 = inner.f, inner.z, inner.s
    orders = _star_orders(outer)

    mirror_rows = []
    for j in range(f1):
        row = tuple(STAR if outer.grid[j][c] == STAR else None for c in range(outer.k))
        mirror_rows.extend([row] * f2)
    mirror = MirrorPlacement(grid=tuple(mirror_rows))

    blocks = []
    for c in range(outer.k):
        rows: list[tuple[Cell, ...]] = []
        for j in range(f1):
            shift = _inner_shift(outer, c, j, orders) * s2
            rows.extend(pda_shift(inner, shift).grid)
        distinct = len({cell for row in rows for cell in row if cell != STAR})
        assert distinct == f1 * s2
        blocks.append(Pda(k=inner.k, f=f1 * f2, z=f1 * z2, s=distinct, grid=tuple(rows)))

    s_m = frozenset(range(s1 * s2 + 1, (s1 + z1 * outer.k) * s2 + 1))
    h = Hpda(
        k1=outer.k,
        k2=inner.k,
        f=f1 * f2,
        z1=z1 * f2,
        z2=z2 * f1,
        mirror=mirror,
        blocks=tuple(blocks),
        s_m=s_m,
    )
    _assert_hybrid_sets(h, outer, s2)
    return h


def _assert_hybrid_sets(h: Hpda, outer: Pda, s2: int) -> None:
    """Scanned per-block id sets must match their closed forms."""
    for c in range(outer.k):
        fresh_lo = (c * outer.z + outer.s) * s2
        fresh_hi = ((c + 1) * outer.z + outer.s) * s2
        expected = set(range(fresh_lo + 1, fresh_hi + 1))
        for cell in {row[c] for row in outer.grid if row[c] != STAR}:
            expected.update(range((cell - 1) * s2 + 1, cell * s2 + 1))
        assert h.s_k[c] == frozenset(expected)


def hybrid_params(
    outer_params: tuple[int, int, int, int], inner_params: tuple[int, int, int, int]
) -> SchemeLoads:
    """Loads of the hybrid construction from the two (K, F, Z, S) tuples."""
    _, f1, z1, s1 = outer_params
    _, f2, z2, s2 = inner_params
    return SchemeLoads(
        r1=Fraction(s1 * s2, f1 * f2),
        r2=Fraction(s2, f2),
        f=f1 * f2,
        m1_ratio=Fraction(z1, f1),
        m2_ratio=Fraction(z2, f2),
    )


def inner_sets_disjoint(outer: Pda, inner: Pda) -> bool:
    """Check the shift layout of :func:`build_hybrid` never reuses an id.

    The id sets of any two distinct shifted copies must be disjoint: copies
    for distinct outer integers, copies for stars at distinct column
    positions, copies for stars in distinct columns, and any integer copy
    against any star copy.
    """
    base = sorted(inner.integer_set())
    orders = _star_orders(outer)
    integer_copies = {
        s: {v + (s - 1) * inner.s for v in base} for s in range(1, outer.s + 1)
    }
    star_copies = {}
    for (c, j), order in orders.items():
        shift = (c * outer.z + order - 1 + outer.s) * inner.s
        star_copies[(c, j)] = {v + shift for v in base}

    ids = sorted(integer_copies)
    for i, s in enumerate(ids):
        for s2 in ids[i + 1 :]:
            if integer_copies[s] & integer_copies[s2]:
                return False
    keys = sorted(star_copies)
    for i, a in enumerate(keys):
        for b in keys[i + 1 :]:
            same_column = a[0] == b[0]
            distinct_order = orders[a] != orders[b]
            if same_column and not distinct_order:
                continue
            if star_copies[a] & star_copies[b]:
                return False
    for s in ids:
        for key in keys:
            if integer_copies[s] & star_copies[key]:
                return False
    return True


def loads_from_hpda(h: Hpda) -> SchemeLoads:
    """Loads measured from the id sets of a verified array (not closed forms)."""
    report = verify_hpda(h)
    if not report.valid:
        first = report.violations[0]
        raise ValueError(f"invalid HPDA: {first.condition}: {first.message}")
    union = h.union_integers()
    return SchemeLoads(
        r1=Fraction(len(union) - len(h.s_m), h.f),
        r2=max(Fraction(len(sk), h.f) for sk in h.s_k),
        f=h.f,
        m1_ratio=Fraction(h.z1, h.f),
        m2_ratio=Fraction(h.z2, h.f),
    )


def derive_s_m(
    mirror: MirrorPlacement, blocks: tuple[Pda, ...]
) -> frozenset[int]:
    """Largest valid mirror-only id set for the given grids.

    An id qualifies when it occurs in exactly one block and every occurrence
    sits on a row that block's mirror caches; serving it from the mirror
    instead of the server is then always legal and never raises either load.
    """
    occ: dict[int, list[tuple[int, int]]] = {}
    for g, block in enumerate(blocks, start=1):
        for j, row in enumerate(block.grid, start=1):
            for cell in row:
                if cell != STAR:
                    occ.setdefault(cell, []).append((g, j))
    qualified = set()
    for s, cells in occ.items():
        owners = {g for g, _ in cells}
        if len(owners) == 1 and all(mirror.is_star(j, g) for g, j in cells):
            qualified.add(s)
    return frozenset(qualified)


def format_hpda(h: Hpda) -> str:
    """Render as ``HPDA K1 K2 F Z1 Z2`` + F rows of mirror then block tokens."""
    lines = [f"HPDA {h.k1} {h.k2} {h.f} {h.z1} {h.z2}"]
    for j in range(h.f):
        tokens = [STAR if cell == STAR else "-" for cell in h.mirror.grid[j]]
        for block in h.blocks:
            tokens.extend(STAR if c == STAR else str(c) for c in block.grid[j])
        lines.append(" ".join(tokens))
    return "\n".join(lines) + "\n"


def parse_hpda(text: str) -> Hpda:
    """Parse the text format; id sets are derived from the grids, never stored."""
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise PdaFormatError("empty input", 1)
    header = lines[0].split()
    if len(header) != 6 or header[0] != "HPDA":
        raise PdaFormatError("expected header 'HPDA K1 K2 F Z1 Z2'", 1)
    try:
        k1, k2, f, z1, z2 = (int(v) for v in header[1:])
    except ValueError:
        raise PdaFormatError("non-integer value in header", 1) from None
    if len(lines) - 1 != f:
        raise PdaFormatError(f"expected {f} grid rows, found {len(lines) - 1}", len(lines))
    if k1 < 1 or k2 < 1:
        raise PdaFormatError("K1 and K2 must be positive", 1)
    mirror_rows = []
    block_rows: list[list[list[Cell]]] = [[] for _ in range(k1)]
    for lineno, line in enumerate(lines[1:], start=2):
        tokens = line.split()
        if len(tokens) != k1 + k1 * k2:
            raise PdaFormatError(
                f"expected {k1 + k1 * k2} tokens, found {len(tokens)}", lineno
            )
        mirror_row = []
        for col, tok in enumerate(tokens[:k1], start=1):
            if tok == STAR:
                mirror_row.append(STAR)
            elif tok == "-":
                mirror_row.append(None)
            else:
                raise PdaFormatError(f"invalid mirror token {tok!r}", lineno, col)
        mirror_rows.append(tuple(mirror_row))
        for g in range(k1):
            start = k1 + g * k2
            row = []
            for col, tok in enumerate(tokens[start : start + k2], start=start + 1):
                if tok == STAR:
                    row.append(STAR)
                elif tok.isdigit() and int(tok) >= 1:
                    row.append(int(tok))
                else:
                    raise PdaFormatError(f"invalid block token {tok!r}", lineno, col)
            block_rows[g].append(row)
    try:
        mirror = MirrorPlacement(grid=tuple(mirror_rows))
        blocks = []
        for g in range(k1):
            rows = tuple(tuple(row) for row in block_rows[g])
            distinct = len({c for row in rows for c in row if c != STAR})
            blocks.append(Pda(k=k2, f=f, z=z2, s=distinct, grid=rows))
        s_m = derive_s_m(mirror, tuple(blocks))
        return Hpda(
            k1=k1, k2=k2, f=f, z1=z1, z2=z2, mirror=mirror, blocks=tuple(blocks), s_m=s_m
        )
    except ValueError as exc:
        raise PdaFormatError(str(exc)) from None


def save_hpda(h: Hpda, sink: str | Path | IO[str]) -> None:
    text = format_hpda(h)
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        Path(sink).write_text(text)


def load_hpda(source: str | Path | IO[str]) -> Hpda:
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text()
    return parse_hpda(text)
