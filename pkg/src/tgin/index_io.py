"""Persisted per-(item, order) triangle index.

Line-oriented text, deterministically sorted, so identical indexes are
byte-identical on disk. Writers go through a temp file and an atomic
rename; a `.gz` destination switches on gzip with a fixed mtime.
"""

import gzip
import os
import tempfile
from dataclasses import dataclass

from .errors import IntegrityError, ParseError

FORMAT_TAG = "#tgin-index v1"


def format_relevance(value: float) -> str:
    return format(value, ".9g")


@dataclass(frozen=True)
class IndexRow:
    node_a: str
    node_b: str
    node_c: str
    relevance: float
    rank: int
    padded: bool

    @property
    def is_pseudo(self) -> bool:
        return self.node_a == self.node_b == self.node_c


@dataclass
class TriangleIndex:
    n: int
    orders: list[int]
    entries: dict[tuple[str, int], list[IndexRow]]

    def validate(self) -> None:
        declared = set(self.orders)
        for (item, k), rows in self.entries.items():
            where = f"entry ({item!r}, k={k})"
            if k not in declared:
                raise IntegrityError(f"{where}: order not declared in header")
            if len(rows) != self.n:
                raise IntegrityError(f"{where}: {len(rows)} rows, expected {self.n}")
            seen = set()
            for pos, row in enumerate(rows):
                if row.rank in seen:
                    raise IntegrityError(f"{where}: duplicate rank {row.rank}")
                seen.add(row.rank)
                if row.rank != pos:
                    raise IntegrityError(f"{where}: rank {row.rank} at position {pos}")
                if row.is_pseudo and row.relevance != 0.0:
                    raise IntegrityError(f"{where}: pseudo row with nonzero relevance")


def _is_gzip(path) -> bool:
    return str(path).endswith(".gz")


def write_index(index: TriangleIndex, destination) -> int:
    """Serialize to `destination`, returning the byte count written."""
    index.validate()
    orders = ",".join(str(k) for k in index.orders)
    lines = [f"{FORMAT_TAG} n={index.n} orders={orders}"]
    for (item, k) in sorted(index.entries):
        for row in index.entries[(item, k)]:
            lines.append(f"{item}\t{k}\t{row.rank}\t{row.node_a}\t{row.node_b}"
                         f"\t{row.node_c}\t{format_relevance(row.relevance)}"
                         f"\t{int(row.padded)}")
    payload = ("\n".join(lines) + "\n").encode("utf-8")
    if _is_gzip(destination):
        payload = gzip.compress(payload, mtime=0)

    directory = os.path.dirname(os.fspath(destination)) or "."
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".index-")
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.chmod(tmp, 0o644)
        os.replace(tmp, destination)
    except OSError as exc:
        raise OSError(f"cannot write index to {destination}: {exc}") from exc
    return len(payload)


def read_index(source) -> TriangleIndex:
    """Parse and validate an index file written by `write_index`."""
    opener = gzip.open if _is_gzip(source) else open
    try:
        with opener(source, "rt", encoding="utf-8") as fh:
            raw_lines = fh.read().split("\n")
    except OSError as exc:
        raise OSError(f"cannot read index from {source}: {exc}") from exc
    if raw_lines and raw_lines[-1] == "":
        raw_lines.pop()

    if not raw_lines:
        raise ParseError(source, 1, "empty index file")
    header = raw_lines[0]
    if not header.startswith(FORMAT_TAG + " "):
        raise ParseError(source, 1, f"bad header, expected {FORMAT_TAG!r}")
    fields = dict(part.split("=", 1) for part in header[len(FORMAT_TAG):].split()
                  if "=" in part)
    try:
        n = int(fields["n"])
        orders = [int(k) for k in fields["orders"].split(",")] \
            if fields.get("orders") else []
    except (KeyError, ValueError):
        raise ParseError(source, 1, f"bad header fields: {header!r}") from None

    entries: dict[tuple[str, int], list[IndexRow]] = {}
    current: tuple[str, int] | None = None
    line_no = 1
    for line_no, line in enumerate(raw_lines[1:], 2):
        parts = line.split("\t")
        if len(parts) != 8:
            raise ParseError(source, line_no,
                             f"expected 8 tab-separated fields, got {len(parts)}")
        item, k_s, rank_s, a, b, c, rel_s, padded_s = parts
        try:
            k, rank, rel = int(k_s), int(rank_s), float(rel_s)
        except ValueError:
            raise ParseError(source, line_no, f"bad numeric field in {line!r}") from None
        if padded_s not in ("0", "1"):
            raise ParseError(source, line_no, f"bad padded flag: {padded_s!r}")
        key = (item, k)
        if key != current:
            if current is not None and len(entries[current]) != n:
                raise IntegrityError(
                    f"{source}:{line_no}: entry {current} has "
                    f"{len(entries[current])} of {n} rows")
            if key in entries:
                raise IntegrityError(f"{source}:{line_no}: entry {key} repeated "
                                     "non-contiguously")
            entries[key] = []
            current = key
        entries[key].append(IndexRow(a, b, c, rel, rank, padded_s == "1"))
    if current is not None and len(entries[current]) != n:
        raise ParseError(source, line_no,
                         f"unexpected end of file: entry {current} has "
                         f"{len(entries[current])} of {n} rows")

    index = TriangleIndex(n, orders, entries)
    index.validate()
    return index
