"""Single-layer placement delivery arrays: construction, verification, transforms.

A placement delivery array is an F x K grid whose cells are either the star
marker (a cached packet) or a positive integer (a multicast id shared by every
cell carrying that id).  All row/column indices reported by this module are
1-based, matching the usual presentation of these arrays; the raw ``grid``
tuples are plain Python sequences indexed ``grid[j - 1][k - 1]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import IO, Iterable, Union

STAR = "*"

Cell = Union[int, str]


class PdaFormatError(ValueError):
    """Array text that cannot be parsed; carries the offending line/column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", token {column}" if column is not None else "")
            where = f" ({where})"
        super().__init__(f"{message}{where}")


@dataclass(frozen=True)
class Violation:
    """One failed condition with 1-based witness coordinates."""

    condition: str
    coords: tuple[int, ...]
    message: str


@dataclass(frozen=True)
class VerificationReport:
    valid: bool
    violations: tuple[Violation, ...]


@dataclass(frozen=True)
class Pda:
    """F x K array over {STAR} and positive integers with declared (K, F, Z, S).

    ``z`` declares the star count of every column and ``s`` the number of
    distinct multicast ids; both are checked against the grid by
    :func:`verify_pda`, not at construction time.
    """

    k: int
    f: int
    z: int
    s: int
    grid: tuple[tuple[Cell, ...], ...]

    def __post_init__(self) -> None:
        if self.k < 1 or self.f < 1:
            raise ValueError(f"array dimensions must be positive, got F={self.f} K={self.k}")
        if not 0 <= self.z <= self.f:
            raise ValueError(f"star count Z={self.z} outside [0, {self.f}]")
        if self.s < 0:
            raise ValueError(f"integer count S={self.s} must be nonnegative")
        grid = tuple(tuple(row) for row in self.grid)
        if len(grid) != self.f:
            raise ValueError(f"grid has {len(grid)} rows, declared F={self.f}")
        for j, row in enumerate(grid, start=1):
            if len(row) != self.k:
                raise ValueError(f"row {j} has {len(row)} entries, declared K={self.k}")
            for cell in row:
                if cell != STAR and not (isinstance(cell, int) and cell >= 1):
                    raise ValueError(f"row {j} holds invalid cell {cell!r}")
        object.__setattr__(self, "grid", grid)

    def entry(self, j: int, k: int) -> Cell:
        """Cell at 1-based (row, column)."""
        return self.grid[j - 1][k - 1]

    def integer_set(self) -> frozenset[int]:
        """Distinct multicast ids present in the grid."""
        return frozenset(c for row in self.grid for c in row if c != STAR)


@dataclass(frozen=True)
class SubsetIndexer:
    """Lexicographic rank/unrank bijection over r-subsets of [1..ground_size].

    Ranks are 1-based; ``rank`` and ``unrank`` are mutually inverse over all
    r-subsets, ordered lexicographically as sorted tuples.
    """

    ground_size: int
    subset_size: int

    def __post_init__(self) -> None:
        if self.ground_size < 1:
            raise ValueError("ground set must be nonempty")
        if not 1 <= self.subset_size <= self.ground_size:
            raise ValueError(
                f"subset size {self.subset_size} outside [1, {self.ground_size}]"
            )

    @property
    def count(self) -> int:
        return math.comb(self.ground_size, self.subset_size)

    def rank(self, subset: Iterable[int]) -> int:
        elems = sorted(subset)
        n, r = self.ground_size, self.subset_size
        if len(elems) != r or len(set(elems)) != r:
            raise ValueError(f"expected {r} distinct elements, got {elems}")
        if elems[0] < 1 or elems[-1] > n:
            raise ValueError(f"elements of {elems} outside [1, {n}]")
        rank = 1
        prev = 0
        for i, a in enumerate(elems, start=1):
            for skipped in range(prev + 1, a):
                rank += math.comb(n - skipped, r - i)
            prev = a
        return rank

    def unrank(self, rank: int) -> tuple[int, ...]:
        if not 1 <= rank <= self.count:
            raise ValueError(f"rank {rank} outside [1, {self.count}]")
        remaining = rank - 1
        subset = []
        candidate = 1
        for i in range(1, self.subset_size + 1):
            while True:
                below = math.comb(self.ground_size - candidate, self.subset_size - i)
                if remaining < below:
                    break
                remaining -= below
                candidate += 1
            subset.append(candidate)
            candidate += 1
        return tuple(subset)


def mn_pda(k: int, t: int) -> Pda:
    """Canonical single-layer array on k users at memory point t/k.

    Rows are the t-subsets of [1..k] in lexicographic order.  The entry at
    (T, c) is a star when c is in T, otherwise the lexicographic rank of
    T | {c} among the (t+1)-subsets.  The result is a
    (k, C(k,t), C(k-1,t-1), C(k,t+1)) array.
    """
    if not 1 <= t <= k:
        raise ValueError(f"t must be in [1, {k}], got {t}")
    ranks = {
        sub: i for i, sub in enumerate(combinations(range(1, k + 1), t + 1), start=1)
    }
    rows = []
    for t_set in combinations(range(1, k + 1), t):
        members = set(t_set)
        row: list[Cell] = []
        for c in range(1, k + 1):
            if c in members:
                row.append(STAR)
            else:
                row.append(ranks[tuple(sorted(t_set + (c,)))])
        rows.append(tuple(row))
    return Pda(
        k=k,
        f=math.comb(k, t),
        z=math.comb(k - 1, t - 1),
        s=math.comb(k, t + 1),
        grid=tuple(rows),
    )


def verify_pda(p: Pda) -> VerificationReport:
    """Check the declared (K, F, Z, S) against the grid.

    C1: every column holds exactly Z stars.  C2: the grid holds exactly S
    distinct integers.  C3: equal integers lie in distinct rows and columns
    (C3a) and the complementary corners of their 2x2 subarray are stars (C3b).
    Malformed declarations yield violations, never exceptions.
    """
    violations: list[Violation] = []
    for k in range(p.k):
        stars = sum(1 for j in range(p.f) if p.grid[j][k] == STAR)
        if stars != p.z:
            violations.append(
                Violation("C1", (k + 1,), f"column {k + 1} has {stars} stars, expected {p.z}")
            )
    occurrences: dict[int, list[tuple[int, int]]] = {}
    for j in range(p.f):
        for k in range(p.k):
            cell = p.grid[j][k]
            if cell != STAR:
                occurrences.setdefault(cell, []).append((j, k))
    if len(occurrences) != p.s:
        violations.append(
            Violation("C2", (), f"{len(occurrences)} distinct integers, declared S={p.s}")
        )
    for value, cells in occurrences.items():
        for (j1, k1), (j2, k2) in combinations(cells, 2):
            if j1 == j2 or k1 == k2:
                axis = "row" if j1 == j2 else "column"
                violations.append(
                    Violation(
                        "C3a",
                        (j1 + 1, k1 + 1, j2 + 1, k2 + 1),
                        f"integer {value} repeats in the same {axis}",
                    )
                )
            elif p.grid[j1][k2] != STAR or p.grid[j2][k1] != STAR:
                violations.append(
                    Violation(
                        "C3b",
                        (j1 + 1, k1 + 1, j2 + 1, k2 + 1),
                        f"occurrences of {value} lack the star-complement 2x2 pattern",
                    )
                )
    return VerificationReport(valid=not violations, violations=tuple(violations))


def pda_shift(p: Pda, a: int) -> Pda:
    """Add ``a`` to every integer cell, leaving stars untouched."""
    if a == 0:
        return p
    rows = []
    for j, row in enumerate(p.grid, start=1):
        shifted: list[Cell] = []
        for cell in row:
            if cell == STAR:
                shifted.append(cell)
            else:
                if cell + a < 1:
                    raise ValueError(f"shift by {a} sends {cell} (row {j}) below 1")
                shifted.append(cell + a)
        rows.append(tuple(shifted))
    return Pda(k=p.k, f=p.f, z=p.z, s=p.s, grid=tuple(rows))


def star_rows(p: Pda) -> list[int]:
    """Ascending 1-based indices of rows consisting entirely of stars."""
    return [j + 1 for j, row in enumerate(p.grid) if all(c == STAR for c in row)]


def column_partition(p: Pda, k1: int) -> list[Pda]:
    """Split into k1 blocks of consecutive columns, rows unchanged.

    Block i keeps columns [(i-1)*K/k1 + 1 .. i*K/k1].  Each block's declared
    star count is inherited from the parent; its integer count is recounted
    from the block's own cells.
    """
    if k1 < 1 or p.k % k1 != 0:
        raise ValueError(f"k1={k1} does not divide K={p.k}")
    width = p.k // k1
    blocks = []
    for i in range(k1):
        rows = tuple(row[i * width : (i + 1) * width] for row in p.grid)
        distinct = len({c for row in rows for c in row if c != STAR})
        blocks.append(Pda(k=width, f=p.f, z=p.z, s=distinct, grid=rows))
    return blocks


def _cell_token(cell: Cell) -> str:
    return STAR if cell == STAR else str(cell)


def format_pda(p: Pda) -> str:
    """Render in the text format ``PDA K F Z S`` + F rows of K tokens."""
    lines = [f"PDA {p.k} {p.f} {p.z} {p.s}"]
    lines.extend(" ".join(_cell_token(c) for c in row) for row in p.grid)
    return "\n".join(lines) + "\n"


def _parse_cell(token: str, line: int, column: int) -> Cell:
    if token == STAR:
        return STAR
    if token.isdigit() and int(token) >= 1:
        return int(token)
    raise PdaFormatError(f"invalid cell token {token!r}", line, column)


def parse_pda(text: str) -> Pda:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise PdaFormatError("empty input", 1)
    header = lines[0].split()
    if len(header) != 5 or header[0] != "PDA":
        raise PdaFormatError("expected header 'PDA K F Z S'", 1)
    try:
        k, f, z, s = (int(v) for v in header[1:])
    except ValueError:
        raise PdaFormatError("non-integer value in header", 1) from None
    if len(lines) - 1 != f:
        raise PdaFormatError(f"expected {f} grid rows, found {len(lines) - 1}", len(lines))
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        tokens = line.split()
        if len(tokens) != k:
            raise PdaFormatError(f"expected {k} tokens, found {len(tokens)}", lineno)
        rows.append(
            tuple(_parse_cell(tok, lineno, col) for col, tok in enumerate(tokens, start=1))
        )
    try:
        return Pda(k=k, f=f, z=z, s=s, grid=tuple(rows))
    except ValueError as exc:
        raise PdaFormatError(str(exc)) from None


def save_pda(p: Pda, sink: str | Path | IO[str]) -> None:
    """Write the text format to a path or text stream."""
    text = format_pda(p)
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        Path(sink).write_text(text)


def load_pda(source: str | Path | IO[str]) -> Pda:
    """Parse the text format from a path or text stream."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text()
    return parse_pda(text)
