"""Run configuration: defaults < JSON file < command-line overrides."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from netpredict.errors import ConfigError
from netpredict.mutual_info import STRATEGIES, BinRule

DEFAULT_COMBINATIONS = (
    ("KLD-3", "skewness", "poly3"),
    ("KLD-6", "skewness", "poly2"),
    ("KLD-9", "RS-13", "abs_linear"),
)
DEFAULT_EXOG = ("RS-3", "KLD-3", "skewness", "kurtosis", "mean", "variance", "eig-max", "btw-mean", "modularity")

# regression kinds usable in combinations: (change column, degree)
COMBINE_KINDS = {
    "linear": ("actual", 1),
    "poly2": ("actual", 2),
    "poly3": ("actual", 3),
    "sq_linear": ("squared", 1),
    "abs_linear": ("absolute", 1),
}


@dataclass
class RunConfig:
    data: str = "data"
    output: str = "out"
    index_name: str | None = None
    window_length: int = 60
    bin_strategy: str = "equal-width-count"
    bin_parameter: float | None = None  # None -> ceil(window_length / 5) bins
    mi_mode: str = "standard"  # or "literal": skip equal-label cells
    price_transform: str = "price"  # or "log_return"
    horizons: list = field(default_factory=lambda: [3, 6, 9, 13, "All"])
    hist_bin_width: float = 10.0
    epsilon: float = 1e-10
    target_lag: int = 1
    distance_transform: str = "inverse"
    modularity_seed: int = 0
    combinations: list = field(default_factory=lambda: [list(c) for c in DEFAULT_COMBINATIONS])
    grid_step: float = 0.001
    normalize_combination: bool = False
    p_max: int = 3
    d_max: int = 2
    q_max: int = 3
    arimax_order: list = field(default_factory=lambda: [1, 1, 0])
    exog_metrics: list = field(default_factory=lambda: list(DEFAULT_EXOG))
    exog_lag: int = 0
    workers: int = 1

    def bin_rule(self) -> BinRule:
        param = self.bin_parameter
        if param is None:
            return BinRule.default_for(self.window_length)
        return BinRule(self.bin_strategy, param)

    def validate(self) -> "RunConfig":
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(isinstance(self.window_length, int) and self.window_length >= 2, "window_length must be an integer >= 2")
        need(self.bin_strategy in STRATEGIES, f"bin_strategy must be one of {STRATEGIES}")
        try:
            self.bin_rule()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        need(self.mi_mode in ("standard", "literal"), "mi_mode must be 'standard' or 'literal'")
        need(self.price_transform in ("price", "log_return"), "price_transform must be 'price' or 'log_return'")
        need(len(self.horizons) > 0, "horizons must not be empty")
        for s in self.horizons:
            need(s == "All" or (isinstance(s, int) and s >= 1), f"bad horizon {s!r}; use positive integers or 'All'")
        need(self.hist_bin_width > 0, "hist_bin_width must be > 0")
        need(0 < self.epsilon < 1, "epsilon must be in (0, 1)")
        need(isinstance(self.target_lag, int) and self.target_lag >= 1, "target_lag must be an integer >= 1")
        need(self.distance_transform in ("inverse", "complement"), "distance_transform must be 'inverse' or 'complement'")
        for combo in self.combinations:
            need(len(combo) == 3 and combo[2] in COMBINE_KINDS,
                 f"combination {combo!r} must be [metric_a, metric_b, kind] with kind in {sorted(COMBINE_KINDS)}")
        n = round(1 / self.grid_step) if self.grid_step > 0 else 0
        need(n >= 1 and math.isclose(n * self.grid_step, 1.0, abs_tol=1e-9), "grid_step must divide [0, 1]")
        need(0 <= self.p_max <= 5 and 0 <= self.d_max <= 2 and 0 <= self.q_max <= 5, "ARIMA grid bounds out of range")
        need(len(self.arimax_order) == 3 and all(isinstance(v, int) and v >= 0 for v in self.arimax_order)
             and self.arimax_order[1] <= 2, "arimax_order must be [p, d, q] with d <= 2")
        need(isinstance(self.exog_lag, int) and self.exog_lag >= 0, "exog_lag must be an integer >= 0")
        need(isinstance(self.workers, int) and self.workers >= 1, "workers must be an integer >= 1")
        return self

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def load_config(path=None, overrides=None) -> RunConfig:
    """Build a validated config. Unknown keys are rejected."""
    values = {}
    if path is not None:
        try:
            values = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(values, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    return RunConfig(**values).validate()
