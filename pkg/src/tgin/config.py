"""Pipeline configuration: defaults, JSON config files, flag overrides."""

import json
from dataclasses import dataclass, fields, replace

from .errors import InvalidParameterError


@dataclass(frozen=True)
class PipelineConfig:
    window: int = 3
    max_order: int = 2
    triangles_per_item: int = 10
    theta: float = 0.5
    neighbor_cap: int | None = 200
    candidate_cap: int | None = 400   # per-(item, order) cap before the kernel
    bloom_bits_per_edge: int = 10
    bloom_hashes: int = 7
    seed: int = 0
    workers: int | None = None        # None = one per available CPU

    def validate(self) -> "PipelineConfig":
        if self.window < 2:
            raise InvalidParameterError(f"window must be >= 2, got {self.window}")
        if not 0.0 < self.theta < 1.0:
            raise InvalidParameterError(f"theta must be in (0,1), got {self.theta}")
        if self.triangles_per_item < 1:
            raise InvalidParameterError("triangles_per_item must be >= 1")
        if self.max_order < 0:
            raise InvalidParameterError("max_order must be >= 0")
        for name in ("neighbor_cap", "candidate_cap"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise InvalidParameterError(f"{name} must be >= 1 or null")
        if self.bloom_bits_per_edge < 1 or self.bloom_hashes < 1:
            raise InvalidParameterError("bloom sizing must be >= 1")
        return self

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidParameterError(
                f"unknown config keys in {path}: {sorted(unknown)}")
        return cls(**data).validate()

    def override(self, **kwargs) -> "PipelineConfig":
        """Apply non-None overrides (command-line flags win over files)."""
        changes = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **changes).validate()
