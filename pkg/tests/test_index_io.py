"""Index serialization: deterministic bytes, validation, error reporting."""

import gzip

import numpy as np
import pytest

from tgin.errors import IntegrityError, ParseError
from tgin.index_io import (
    IndexRow,
    TriangleIndex,
    format_relevance,
    read_index,
    write_index,
)


def random_index(seed, n=3, items=5, orders=(0, 1)):
    """Random but valid index; relevances pre-quantized to 9 significant
    digits so they are exactly representable in the file format."""
    rng = np.random.default_rng(seed)
    entries = {}
    for i in range(items):
        item = f"i{i:03d}"
        for k in orders:
            rows = []
            for rank in range(n):
                padded = bool(rng.random() < 0.2)
                if padded and rng.random() < 0.5:
                    rows.append(IndexRow(item, item, item, 0.0, rank, True))
                else:
                    rel = float(format_relevance(float(rng.uniform(0, 50))))
                    a, b, c = sorted(f"n{int(x):04d}" for x in rng.integers(0, 500, 3))
                    rows.append(IndexRow(a, b, c, rel, rank, padded))
            entries[(item, k)] = rows
    return TriangleIndex(n, list(orders), entries)


class TestWrite:
    def test_empty_index_is_header_only(self, tmp_path):
        path = tmp_path / "index.tsv"
        write_index(TriangleIndex(2, [0], {}), path)
        assert path.read_text() == "#tgin-index v1 n=2 orders=0\n"

    def test_row_count_matches_n(self, tmp_path):
        index = random_index(0, n=2, items=1, orders=(0,))
        path = tmp_path / "index.tsv"
        write_index(index, path)
        lines = path.read_text().splitlines()
        assert len(lines) == 1 + 2

    def test_returns_byte_count(self, tmp_path):
        path = tmp_path / "index.tsv"
        count = write_index(random_index(1), path)
        assert count == len(path.read_bytes())

    def test_invalid_index_rejected_before_write(self, tmp_path):
        bad = TriangleIndex(2, [0], {("a", 0): [
            IndexRow("x", "y", "z", 1.0, 0, False)]})
        with pytest.raises(IntegrityError, match="1 rows, expected 2"):
            write_index(bad, tmp_path / "index.tsv")
        assert not (tmp_path / "index.tsv").exists()


class TestRoundTrip:
    def test_read_write_identity(self, tmp_path):
        for seed in range(20):
            index = random_index(seed)
            path = tmp_path / f"index{seed}.tsv"
            write_index(index, path)
            assert read_index(path) == index

    def test_write_read_write_byte_identical(self, tmp_path):
        for seed in range(20):
            index = random_index(seed, n=4, items=7, orders=(0, 1, 2))
            p1 = tmp_path / "first.tsv"
            p2 = tmp_path / "second.tsv"
            write_index(index, p1)
            write_index(read_index(p1), p2)
            assert p1.read_bytes() == p2.read_bytes()

    def test_serialization_ignores_entry_insertion_order(self, tmp_path):
        index = random_index(3)
        shuffled = TriangleIndex(index.n, index.orders,
                                 dict(reversed(list(index.entries.items()))))
        p1, p2 = tmp_path / "a.tsv", tmp_path / "b.tsv"
        write_index(index, p1)
        write_index(shuffled, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_gzip_round_trip(self, tmp_path):
        index = random_index(4)
        path = tmp_path / "index.tsv.gz"
        write_index(index, path)
        with gzip.open(path) as fh:
            assert fh.read().startswith(b"#tgin-index v1")
        assert read_index(path) == index

    def test_gzip_deterministic_bytes(self, tmp_path):
        index = random_index(5)
        p1, p2 = tmp_path / "a.tsv.gz", tmp_path / "b.tsv.gz"
        write_index(index, p1)
        write_index(index, p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestReadErrors:
    def write_lines(self, tmp_path, lines):
        path = tmp_path / "index.tsv"
        path.write_text("\n".join(lines) + "\n")
        return path

    def test_duplicate_rank(self, tmp_path):
        path = self.write_lines(tmp_path, [
            "#tgin-index v1 n=2 orders=0",
            "i0\t0\t0\ta\tb\tc\t1\t0",
            "i0\t0\t0\ta\tb\td\t1\t0",
        ])
        with pytest.raises(IntegrityError, match=r"\('i0', k=0\).*duplicate rank"):
            read_index(path)

    def test_truncated_file(self, tmp_path):
        path = self.write_lines(tmp_path, [
            "#tgin-index v1 n=3 orders=0",
            "i0\t0\t0\ta\tb\tc\t1\t0",
            "i0\t0\t1\ta\tb\td\t1\t0",
        ])
        with pytest.raises(ParseError, match=":3: unexpected end of file"):
            read_index(path)

    def test_malformed_line_number(self, tmp_path):
        path = self.write_lines(tmp_path, [
            "#tgin-index v1 n=1 orders=0",
            "i0\t0\t0\ta\tb\tc\t1",
        ])
        with pytest.raises(ParseError, match=":2:"):
            read_index(path)

    def test_bad_header(self, tmp_path):
        path = self.write_lines(tmp_path, ["#wrong v9"])
        with pytest.raises(ParseError, match=":1:"):
            read_index(path)

    def test_non_contiguous_entry(self, tmp_path):
        path = self.write_lines(tmp_path, [
            "#tgin-index v1 n=1 orders=0,1",
            "i0\t0\t0\ta\tb\tc\t1\t0",
            "i0\t1\t0\ta\tb\tc\t1\t0",
            "i0\t0\t0\ta\tb\tq\t1\t0",
        ])
        with pytest.raises(IntegrityError, match="repeated"):
            read_index(path)

    def test_pseudo_row_with_nonzero_relevance(self, tmp_path):
        path = self.write_lines(tmp_path, [
            "#tgin-index v1 n=1 orders=0",
            "i0\t0\t0\tx\tx\tx\t2.5\t1",
        ])
        with pytest.raises(IntegrityError, match="pseudo"):
            read_index(path)

    def test_undeclared_order(self, tmp_path):
        path = self.write_lines(tmp_path, [
            "#tgin-index v1 n=1 orders=0",
            "i0\t2\t0\ta\tb\tc\t1\t0",
        ])
        with pytest.raises(IntegrityError, match="not declared"):
            read_index(path)
