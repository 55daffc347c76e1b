"""Single- and two-factor datasets, CSV ingestion and the fixed-constant adjustments.

Level and replicate indices are 0-based in the Python API. Reports and CSV
error messages use 1-based numbering.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterable, Sequence, Union

from .errors import InvalidInputError, SchemaError

__all__ = [
    "SingleFactorData",
    "TwoFactorData",
    "AdjustedSample",
    "Origin",
    "parse_csv",
    "load_csv",
    "collapse_by_factor",
    "adjust_shift",
    "adjust_cell",
    "moment_sigma",
]

Source = Union[str, bytes, os.PathLike, IO[str], IO[bytes]]


def _as_floats(values: Iterable[float]) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    for v in out:
        if not math.isfinite(v):
            raise InvalidInputError(f"observations must be finite, got {v!r}")
    return out


@dataclass(frozen=True)
class SingleFactorData:
    """Observations ``obs[i][j]``: replicate ``j`` at level ``i`` of factor A."""

    obs: tuple[tuple[float, ...], ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        obs = tuple(_as_floats(row) for row in self.obs)
        if len(obs) < 2:
            raise InvalidInputError("level count r >= 2 required")
        if any(len(row) == 0 for row in obs):
            raise InvalidInputError("every level needs at least one replicate")
        labels = tuple(str(x) for x in self.labels) or tuple(str(i + 1) for i in range(len(obs)))
        if len(labels) != len(obs):
            raise InvalidInputError("one label per level required")
        object.__setattr__(self, "obs", obs)
        object.__setattr__(self, "labels", labels)

    @property
    def r(self) -> int:
        return len(self.obs)

    @property
    def replicates(self) -> tuple[int, ...]:
        return tuple(len(row) for row in self.obs)

    @property
    def n_total(self) -> int:
        return sum(self.replicates)

    @property
    def balanced(self) -> bool:
        return len(set(self.replicates)) == 1

    @property
    def weight_fractions(self) -> tuple[Fraction, ...]:
        n = self.n_total
        return tuple(Fraction(m, n) for m in self.replicates)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(float(w) for w in self.weight_fractions)

    def values(self) -> tuple[float, ...]:
        return tuple(v for row in self.obs for v in row)


@dataclass(frozen=True)
class TwoFactorData:
    """Observations ``obs[i][j][l]``: replicate ``l`` of cell A_i B_j."""

    obs: tuple[tuple[tuple[float, ...], ...], ...]
    labels_a: tuple[str, ...] = ()
    labels_b: tuple[str, ...] = ()

    def __post_init__(self):
        obs = tuple(tuple(_as_floats(cell) for cell in row) for row in self.obs)
        if len(obs) < 2:
            raise InvalidInputError("level count r >= 2 required")
        s = len(obs[0])
        if s < 2:
            raise InvalidInputError("level count s >= 2 required")
        if any(len(row) != s for row in obs):
            raise InvalidInputError("every A level needs the same number of B levels")
        for i, row in enumerate(obs):
            for j, cell in enumerate(row):
                if not cell:
                    raise InvalidInputError(f"cell ({i + 1},{j + 1}) has no observations")
        la = tuple(str(x) for x in self.labels_a) or tuple(str(i + 1) for i in range(len(obs)))
        lb = tuple(str(x) for x in self.labels_b) or tuple(str(j + 1) for j in range(s))
        if len(la) != len(obs) or len(lb) != s:
            raise InvalidInputError("one label per level required")
        object.__setattr__(self, "obs", obs)
        object.__setattr__(self, "labels_a", la)
        object.__setattr__(self, "labels_b", lb)

    @property
    def r(self) -> int:
        return len(self.obs)

    @property
    def s(self) -> int:
        return len(self.obs[0])

    @property
    def cell_replicates(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(len(c) for c in row) for row in self.obs)

    @property
    def n_total(self) -> int:
        return sum(sum(row) for row in self.cell_replicates)

    @property
    def replicates_a(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.cell_replicates)

    @property
    def replicates_b(self) -> tuple[int, ...]:
        m = self.cell_replicates
        return tuple(sum(m[i][j] for i in range(self.r)) for j in range(self.s))

    @property
    def balanced(self) -> bool:
        return len({m for row in self.cell_replicates for m in row}) == 1

    def cell_weight_fractions(self) -> tuple[tuple[Fraction, ...], ...]:
        n = self.n_total
        return tuple(tuple(Fraction(m, n) for m in row) for row in self.cell_replicates)

    def weight_fractions_a(self) -> tuple[Fraction, ...]:
        n = self.n_total
        return tuple(Fraction(m, n) for m in self.replicates_a)

    def weight_fractions_b(self) -> tuple[Fraction, ...]:
        n = self.n_total
        return tuple(Fraction(m, n) for m in self.replicates_b)

    @property
    def cell_weights(self) -> tuple[tuple[float, ...], ...]:
        return tuple(tuple(float(w) for w in row) for row in self.cell_weight_fractions())

    @property
    def weights_a(self) -> tuple[float, ...]:
        return tuple(float(w) for w in self.weight_fractions_a())

    @property
    def weights_b(self) -> tuple[float, ...]:
        return tuple(float(w) for w in self.weight_fractions_b())

    def cells(self):
        """Yield ``(i, j, values)`` in row-major cell order."""
        for i, row in enumerate(self.obs):
            for j, cell in enumerate(row):
                yield i, j, cell

    def values(self) -> tuple[float, ...]:
        return tuple(v for _, _, cell in self.cells() for v in cell)

    def shifted(self, c: float) -> TwoFactorData:
        return TwoFactorData(
            tuple(tuple(tuple(v + c for v in cell) for cell in row) for row in self.obs),
            self.labels_a,
            self.labels_b,
        )


class Origin(str, enum.Enum):
    SHIFT = "shift-by-mu0"
    CELL = "cell-baseline"
    COLLAPSED_A = "collapsed-A"
    COLLAPSED_B = "collapsed-B"


@dataclass(frozen=True)
class AdjustedSample:
    values: tuple[float, ...]
    origin: Origin
    constants: tuple[tuple[str, float], ...]

    @property
    def offset(self) -> float:
        return sum(v for _, v in self.constants)


# --------------------------------------------------------------------------- CSV

def _read_text(stream: Source) -> str:
    if isinstance(stream, bytes):
        return stream.decode("utf-8-sig")
    if isinstance(stream, (str, os.PathLike)):
        with open(stream, "rb") as fh:
            return fh.read().decode("utf-8-sig")
    data = stream.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8-sig")
    return data


def _level_map(labels: list[str]) -> dict[str, int]:
    seen = list(dict.fromkeys(labels))
    try:
        as_int = sorted(seen, key=int)
    except ValueError:
        return {lab: k for k, lab in enumerate(seen)}
    return {lab: k for k, lab in enumerate(as_int)}


def parse_csv(stream: Source, schema: str) -> SingleFactorData | TwoFactorData:
    """Read a ``level_a[,level_b],value`` CSV into a dataset.

    ``schema`` is ``"single"`` or ``"two"``. Integer level labels are ordered
    numerically; any other labels are numbered by first appearance. Row order
    inside a level or cell is kept as the replicate index.
    """
    if schema not in ("single", "two"):
        raise InvalidInputError(f"unknown schema {schema!r}; expected 'single' or 'two'")
    reader = csv.reader(io.StringIO(_read_text(stream)))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise SchemaError("empty input, header row required", line=1) from None

    wanted = ["level_a", "value"] if schema == "single" else ["level_a", "level_b", "value"]
    for col in wanted:
        if col not in header:
            raise SchemaError(f"missing column {col!r}", line=1)
    idx = [header.index(c) for c in wanted]

    rows: list[tuple[int, list[str], float]] = []
    for lineno, rec in enumerate(reader, start=2):
        if not rec or all(not f.strip() for f in rec):
            continue
        if len(rec) < len(header):
            raise SchemaError(f"expected {len(header)} fields, got {len(rec)}", line=lineno)
        fields = [rec[k].strip() for k in idx]
        if any(f == "" for f in fields[:-1]):
            raise SchemaError("empty level label", line=lineno)
        try:
            value = float(fields[-1])
        except ValueError:
            raise SchemaError(f"non-numeric value {fields[-1]!r}", line=lineno) from None
        if not math.isfinite(value):
            raise SchemaError(f"non-finite value {fields[-1]!r}", line=lineno)
        rows.append((lineno, fields[:-1], value))

    if not rows:
        raise SchemaError("no data rows", line=2)

    map_a = _level_map([f[0] for _, f, _ in rows])
    labels_a = tuple(sorted(map_a, key=map_a.get))
    if schema == "single":
        if len(map_a) < 2:
            raise SchemaError("level count r >= 2 required")
        groups: list[list[float]] = [[] for _ in map_a]
        for _, f, v in rows:
            groups[map_a[f[0]]].append(v)
        return SingleFactorData(tuple(tuple(g) for g in groups), labels_a)

    map_b = _level_map([f[1] for _, f, _ in rows])
    labels_b = tuple(sorted(map_b, key=map_b.get))
    if len(map_a) < 2:
        raise SchemaError("level count r >= 2 required")
    if len(map_b) < 2:
        raise SchemaError("level count s >= 2 required")
    cells: list[list[list[float]]] = [[[] for _ in map_b] for _ in map_a]
    for _, f, v in rows:
        cells[map_a[f[0]]][map_b[f[1]]].append(v)
    for i, la in enumerate(labels_a):
        for j, lb in enumerate(labels_b):
            if not cells[i][j]:
                raise SchemaError(
                    f"empty cell (level_a={la}, level_b={lb}); every combination needs "
                    f"at least one observation (last data line {rows[-1][0]})"
                )
    return TwoFactorData(
        tuple(tuple(tuple(c) for c in row) for row in cells), labels_a, labels_b
    )


def load_csv(path: str | os.PathLike, schema: str) -> SingleFactorData | TwoFactorData:
    return parse_csv(os.fspath(path), schema)


# ------------------------------------------------------------------ manipulation

def collapse_by_factor(d: TwoFactorData, which: str) -> SingleFactorData:
    """Merge all observations sharing one level of ``which`` ("A" or "B").

    Level ``i`` of A holds cells (i,1), ..., (i,s) concatenated in that order,
    keeping replicate order inside each cell; B is symmetric.
    """
    if which == "A":
        obs = tuple(tuple(v for cell in row for v in cell) for row in d.obs)
        return SingleFactorData(obs, d.labels_a)
    if which == "B":
        obs = tuple(
            tuple(v for i in range(d.r) for v in d.obs[i][j]) for j in range(d.s)
        )
        return SingleFactorData(obs, d.labels_b)
    raise InvalidInputError(f"which must be 'A' or 'B', got {which!r}")


def adjust_shift(
    sample: Sequence[float], mu0: float, origin: Origin = Origin.SHIFT
) -> AdjustedSample:
    mu0 = float(mu0)
    if not math.isfinite(mu0):
        raise InvalidInputError("mu0 must be finite")
    return AdjustedSample(tuple(float(x) - mu0 for x in sample), Origin(origin), (("mu0", mu0),))


def adjust_cell(
    d: TwoFactorData, i: int, j: int, mu0: float, ai0: float, bj0: float
) -> AdjustedSample:
    """Subtract the cell baseline ``mu0 + ai0 + bj0`` from cell (i, j)."""
    if not (0 <= i < d.r and 0 <= j < d.s):
        raise InvalidInputError(f"cell ({i},{j}) outside a {d.r}x{d.s} design")
    base = float(mu0) + float(ai0) + float(bj0)
    return AdjustedSample(
        tuple(z - base for z in d.obs[i][j]),
        Origin.CELL,
        (("mu0", float(mu0)), (f"a{i + 1}", float(ai0)), (f"b{j + 1}", float(bj0))),
    )


def moment_sigma(sample: Sequence[float], center: float = 0.0) -> float:
    """Square root of the second moment of ``sample`` about ``center`` (divisor m)."""
    if len(sample) == 0:
        raise InvalidInputError("moment_sigma needs a nonempty sample")
    return math.sqrt(math.fsum((x - center) ** 2 for x in sample) / len(sample))
