"""Item catalog: categorical attributes and dense feature vectors per item.

Attributes whose values all parse as numbers are treated as continuous and
bucketed into deciles at load time, so homophily checks compare them as
categoricals. Missing attributes are explicit None, never empty strings.
"""

import numpy as np

from .errors import InvalidInputError, ParseError, UnknownItemError


def _decile_label(value: float, edges: np.ndarray) -> str:
    return f"d{int(np.searchsorted(edges, value, side='right'))}"


class ItemCatalog:
    def __init__(self, attributes: dict[str, dict[str, str | None]],
                 features: dict[str, np.ndarray],
                 bucketed: tuple[str, ...] = ()):
        if set(attributes) != set(features):
            raise InvalidInputError("attribute and feature item sets differ")
        dims = {len(v) for v in features.values()}
        if len(dims) > 1:
            raise InvalidInputError(f"inconsistent feature dimensions: {sorted(dims)}")
        for item, attrs in attributes.items():
            for name, value in attrs.items():
                if value == "":
                    raise InvalidInputError(
                        f"empty-string attribute {name!r} on {item!r}; use None")
        self.attributes = attributes
        self.features = {k: np.asarray(v, dtype=np.float64) for k, v in features.items()}
        self.feature_dim = dims.pop() if dims else 0
        schema: set[str] = set()
        for attrs in attributes.values():
            schema.update(attrs)
        self.schema: tuple[str, ...] = tuple(sorted(schema))
        self.bucketed = bucketed
        self._matrix: np.ndarray | None = None
        self._row: dict[str, int] | None = None

    def __contains__(self, item: str) -> bool:
        return item in self.features

    def __len__(self) -> int:
        return len(self.features)

    def attribute(self, item: str, name: str) -> str | None:
        try:
            attrs = self.attributes[item]
        except KeyError:
            raise UnknownItemError(f"unknown item: {item!r}") from None
        return attrs.get(name)

    def feature(self, item: str) -> np.ndarray:
        try:
            return self.features[item]
        except KeyError:
            raise UnknownItemError(f"unknown item: {item!r}") from None

    def feature_matrix(self) -> tuple[np.ndarray, dict[str, int]]:
        """Stacked feature rows (sorted by item id) plus item -> row map."""
        if self._matrix is None:
            ids = sorted(self.features)
            self._row = {item: i for i, item in enumerate(ids)}
            self._matrix = (np.stack([self.features[i] for i in ids])
                            if ids else np.zeros((0, 0)))
        return self._matrix, self._row


def bucket_continuous_attributes(attributes: dict[str, dict[str, str | None]],
                                 ) -> tuple[dict[str, dict[str, str | None]], tuple[str, ...]]:
    """Replace all-numeric attributes with decile labels d0..d9."""
    by_attr: dict[str, list[tuple[str, str]]] = {}
    for item, attrs in attributes.items():
        for name, value in attrs.items():
            if value is not None:
                by_attr.setdefault(name, []).append((item, value))
    bucketed = []
    for name, pairs in sorted(by_attr.items()):
        try:
            values = [float(v) for _, v in pairs]
        except ValueError:
            continue
        bucketed.append(name)
        edges = np.quantile(values, np.linspace(0.1, 0.9, 9))
        for (item, _), value in zip(pairs, values):
            attributes[item][name] = _decile_label(value, edges)
    return attributes, tuple(bucketed)


# -- catalog file format ------------------------------------------------------
# TSV: item_id  attr=value;attr=value;...  comma-separated feature floats

def load_catalog(path, bucket_deciles: bool = True) -> ItemCatalog:
    attributes: dict[str, dict[str, str | None]] = {}
    features: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ParseError(path, line_no,
                                 f"expected 3 tab-separated fields, got {len(parts)}")
            item, attr_field, feat_field = parts
            if item in attributes:
                raise ParseError(path, line_no, f"duplicate item: {item!r}")
            attrs: dict[str, str | None] = {}
            if attr_field:
                for chunk in attr_field.split(";"):
                    if "=" not in chunk:
                        raise ParseError(path, line_no, f"bad attribute token: {chunk!r}")
                    name, value = chunk.split("=", 1)
                    if not name or not value:
                        raise ParseError(path, line_no, f"bad attribute token: {chunk!r}")
                    attrs[name] = value
            try:
                vec = np.array([float(x) for x in feat_field.split(",")]) \
                    if feat_field else np.zeros(0)
            except ValueError:
                raise ParseError(path, line_no, f"bad feature vector: {feat_field!r}") from None
            attributes[item] = attrs
            features[item] = vec
    # absent attribute names become explicit nulls once the schema is known
    schema = sorted({name for attrs in attributes.values() for name in attrs})
    for attrs in attributes.values():
        for name in schema:
            attrs.setdefault(name, None)
    bucketed: tuple[str, ...] = ()
    if bucket_deciles:
        attributes, bucketed = bucket_continuous_attributes(attributes)
    return ItemCatalog(attributes, features, bucketed)


def save_catalog(catalog: ItemCatalog, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for item in sorted(catalog.features):
            attrs = catalog.attributes[item]
            attr_field = ";".join(f"{k}={attrs[k]}" for k in sorted(attrs)
                                  if attrs[k] is not None)
            feat_field = ",".join(format(x, ".9g") for x in catalog.features[item])
            fh.write(f"{item}\t{attr_field}\t{feat_field}\n")
