"""Run configuration: defaults, validation, and the flat key-value config
file format.

Defaults mirror the reference setup: nine resolutions, 5000 trees, two
split candidates per node, four fixed clusters, and a sweep over 2..10
clusters. CLI flags override file values; environment variables are never
consulted, so a config file plus a manifest reproduces a run exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import InvalidConfig
from .series import DEFAULT_FREQUENCIES, ResolutionSpec, default_resolutions

#: Accepted forest sizes; 5000 is the default, the rest are scale-down presets.
N_TREES_PRESETS = (500, 1000, 2000, 3000, 4000, 5000)

DEFAULT_STATISTICS = {"temperature": "mean", "default": "sum"}

DEFAULT_K_SWEEP = tuple(range(2, 11))


@dataclass(frozen=True)
class RunConfig:
    """Everything that parameterises a pipeline run besides the data."""

    resolutions: tuple[str, ...] = tuple(DEFAULT_FREQUENCIES)
    n_trees: int = 5000
    mtry: int = 2
    k_fixed: int = 4
    k_sweep: tuple[int, ...] = DEFAULT_K_SWEEP
    seed: int = 0
    workers: int = 1
    proximity_oob: bool = False
    statistics: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_STATISTICS))

    def __post_init__(self):
        unknown = [r for r in self.resolutions if r not in DEFAULT_FREQUENCIES]
        if unknown:
            raise InvalidConfig(f"unknown resolutions {unknown}; valid: {list(DEFAULT_FREQUENCIES)}")
        if not self.resolutions:
            raise InvalidConfig("at least one resolution is required")
        if len(set(self.resolutions)) != len(self.resolutions):
            raise InvalidConfig("duplicate resolution names")
        if self.n_trees not in N_TREES_PRESETS:
            raise InvalidConfig(f"n_trees must be one of {N_TREES_PRESETS}, got {self.n_trees}")
        if not 1 <= self.mtry <= 23:
            raise InvalidConfig(f"mtry must be in [1, 23], got {self.mtry}")
        if self.k_fixed < 2:
            raise InvalidConfig(f"k_fixed must be >= 2, got {self.k_fixed}")
        if not self.k_sweep or any(k < 2 for k in self.k_sweep):
            raise InvalidConfig("k_sweep must be a non-empty set of integers >= 2")
        if self.seed < 0:
            raise InvalidConfig(f"seed must be >= 0, got {self.seed}")
        if self.workers < 1:
            raise InvalidConfig(f"workers must be >= 1, got {self.workers}")
        if "default" not in self.statistics:
            raise InvalidConfig("statistics must include a 'default' entry")
        bad = {k: v for k, v in self.statistics.items() if v not in ("sum", "mean")}
        if bad:
            raise InvalidConfig(f"statistics must be 'sum' or 'mean', got {bad}")

    def statistic_for(self, series_type: str) -> str:
        return self.statistics.get(series_type, self.statistics["default"])

    def resolution_specs(self, series_type: str) -> list[ResolutionSpec]:
        """The configured resolutions with the statistic of this series type."""
        stat = self.statistic_for(series_type)
        by_name = {spec.name: spec for spec in default_resolutions(stat)}
        return [by_name[name] for name in self.resolutions]

    def as_mapping(self) -> dict:
        return {
            "resolutions": ",".join(self.resolutions),
            "n_trees": self.n_trees,
            "mtry": self.mtry,
            "k_fixed": self.k_fixed,
            "k_sweep": ",".join(str(k) for k in self.k_sweep),
            "seed": self.seed,
            "workers": self.workers,
            "proximity_oob": self.proximity_oob,
            **{f"statistic.{k}": v for k, v in sorted(self.statistics.items())},
        }


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise InvalidConfig(f"{key} must be an integer, got {raw!r}") from None


def config_from_items(items: dict[str, str]) -> RunConfig:
    """Build a RunConfig from flat string key-value pairs.

    Recognised keys: resolutions, n_trees, mtry, k_fixed, k_sweep, seed,
    workers, proximity_oob, and statistic.<series_type>.
    """
    kwargs: dict = {}
    statistics = dict(DEFAULT_STATISTICS)
    for key, raw in items.items():
        value = raw.strip()
        if key == "resolutions":
            kwargs["resolutions"] = tuple(s.strip() for s in value.split(",") if s.strip())
        elif key in ("n_trees", "mtry", "k_fixed", "seed", "workers"):
            kwargs[key] = _parse_int(key, value)
        elif key == "k_sweep":
            kwargs["k_sweep"] = tuple(_parse_int(key, s) for s in value.split(",") if s.strip())
        elif key == "proximity_oob":
            if value.lower() not in ("true", "false"):
                raise InvalidConfig(f"proximity_oob must be true or false, got {value!r}")
            kwargs["proximity_oob"] = value.lower() == "true"
        elif key.startswith("statistic."):
            statistics[key[len("statistic."):]] = value
        else:
            raise InvalidConfig(f"unknown config key {key!r}")
    return RunConfig(statistics=statistics, **kwargs)


def read_config(path) -> RunConfig:
    """Parse a flat ``key = value`` config file ('#' starts a comment)."""
    items: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise InvalidConfig(f"{path}:{lineno}: expected 'key = value', got {line.rstrip()!r}")
            key, value = stripped.split("=", 1)
            items[key.strip()] = value.strip()
    return config_from_items(items)


def apply_overrides(config: RunConfig, **overrides) -> RunConfig:
    """Return a copy with the given non-None fields replaced."""
    changes = {k: v for k, v in overrides.items() if v is not None}
    if not changes:
        return config
    return replace(config, **changes)
