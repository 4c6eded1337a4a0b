"""Catalog loading, attribute nulls and decile bucketing."""

import numpy as np
import pytest

from tgin.catalog import ItemCatalog, load_catalog, save_catalog
from tgin.errors import InvalidInputError, ParseError, UnknownItemError


def small_catalog():
    attributes = {
        "a": {"category": "shoes", "price": "3.5"},
        "b": {"category": "shoes", "price": None},
        "c": {"category": None, "price": None},
    }
    features = {k: np.array([1.0, 0.0, float(i)]) for i, k in enumerate("abc")}
    return ItemCatalog(attributes, features)


def test_schema_and_nulls():
    cat = small_catalog()
    assert cat.schema == ("category", "price")
    assert cat.attribute("c", "category") is None
    assert cat.attribute("a", "category") == "shoes"


def test_empty_string_attribute_rejected():
    with pytest.raises(InvalidInputError):
        ItemCatalog({"a": {"x": ""}}, {"a": np.zeros(2)})


def test_inconsistent_dims_rejected():
    with pytest.raises(InvalidInputError):
        ItemCatalog({"a": {}, "b": {}}, {"a": np.zeros(2), "b": np.zeros(3)})


def test_unknown_item():
    cat = small_catalog()
    with pytest.raises(UnknownItemError):
        cat.feature("zzz")


def test_file_round_trip(tmp_path):
    cat = small_catalog()
    path = tmp_path / "catalog.tsv"
    save_catalog(cat, path)
    loaded = load_catalog(path, bucket_deciles=False)
    assert loaded.schema == cat.schema
    assert loaded.attributes == cat.attributes
    for item in cat.features:
        np.testing.assert_array_equal(loaded.features[item], cat.features[item])


def test_decile_bucketing_on_load(tmp_path):
    lines = [f"i{k:02d}\tprice={k}.5;category=c{k % 2}\t0.0,1.0\n" for k in range(20)]
    path = tmp_path / "catalog.tsv"
    path.write_text("".join(lines))
    cat = load_catalog(path)
    assert cat.bucketed == ("price",)
    values = {cat.attribute(f"i{k:02d}", "price") for k in range(20)}
    assert values <= {f"d{i}" for i in range(10)}
    # equal-width spread over 20 points fills all ten deciles
    assert len(values) == 10
    # category values are not numeric and stay untouched
    assert cat.attribute("i00", "category") == "c0"


def test_parse_errors(tmp_path):
    path = tmp_path / "catalog.tsv"
    path.write_text("a\tcategory=x\t1.0\nb\tbroken\t1.0\n")
    with pytest.raises(ParseError, match="catalog.tsv:2"):
        load_catalog(path)
    path.write_text("a\tcategory=x\tnot-a-float\n")
    with pytest.raises(ParseError, match="catalog.tsv:1"):
        load_catalog(path)
