"""Scenario configurations for the sweep engine.

Each scenario reproduces one figure-style numerical experiment: chaotic
Ising or TFIM chains started from random/product states, disordered XXZ
chains started from the Neel state, and the TFIM global quench analyzed
with Gaussian-state distances.  Model parameters are fixed per scenario
(see PROVENANCE); sizes, ratios, averaging windows, and sampling are
configurable and default to desk-scale values.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np
import yaml

from ..errors import ConfigError
from ..states import MetricKind

SQRT2 = float(np.sqrt(2.0))
SQRT3_HALF = float(np.sqrt(3.0) / 2.0)


class Scenario(str, Enum):
    FIG1_RANDOM = "fig1_random"
    FIG2_PRODUCT = "fig2_product"
    FIG3_XXZ = "fig3_xxz"
    FIGS1_TRANSITION = "figs1_transition"
    FIGS2_TFIM_RANDOM = "figs2_tfim_random"
    FIGS3_TFIM_PRODUCT = "figs3_tfim_product"
    FIGS4_QUENCH = "figs4_quench"


#: fixed model parameters per scenario; run_scenario asserts against this
#: table before doing any work.
PROVENANCE = {
    Scenario.FIG1_RANDOM: {"h_x": SQRT3_HALF, "h_z": SQRT2},
    Scenario.FIG2_PRODUCT: {"h_x": SQRT3_HALF, "h_z": SQRT2},
    Scenario.FIG3_XXZ: {"delta": 1.0},
    Scenario.FIGS1_TRANSITION: {"delta": 1.0},
    Scenario.FIGS2_TFIM_RANDOM: {"h_z": SQRT2},
    Scenario.FIGS3_TFIM_PRODUCT: {"h_z": SQRT2},
    Scenario.FIGS4_QUENCH: {"h0": SQRT2, "h1": 1.0, "t_star_factor": 3.0 / 8.0},
}

#: time window [a*L, b*L] hard-wired per scenario (figure captions);
#: the quench scenario instead samples t in [0, L] and evaluates t* = 3L/8.
WINDOW_FACTORS = {
    Scenario.FIG1_RANDOM: (1.0, 2.0),
    Scenario.FIG2_PRODUCT: (1.0, 2.0),
    Scenario.FIG3_XXZ: (4.0, 8.0),
    Scenario.FIGS1_TRANSITION: (4.0, 8.0),
    Scenario.FIGS2_TFIM_RANDOM: (1.0, 2.0),
    Scenario.FIGS3_TFIM_PRODUCT: (1.0, 2.0),
    Scenario.FIGS4_QUENCH: (0.0, 1.0),
}

_PRODUCT_STATES = ("x+", "y+", "z+", "neel")

_DEFAULTS = {
    Scenario.FIG1_RANDOM: dict(
        sizes=(8, 10, 12), metrics=("trace",), realizations=1
    ),
    Scenario.FIG2_PRODUCT: dict(
        sizes=(8, 10, 12),
        metrics=("trace",),
        realizations=1,
        states=("y+", "x+", "z+"),
    ),
    Scenario.FIG3_XXZ: dict(
        sizes=(8, 10, 12),
        metrics=("trace",),
        realizations=16,
        h_values=(0.0, SQRT2, float(np.sqrt(17.0)), float(np.sqrt(43.0))),
    ),
    Scenario.FIGS1_TRANSITION: dict(
        sizes=(8, 10, 12),
        metrics=("trace",),
        realizations=16,
        h_values=(2.0, 2.5, 3.0, 3.5, 4.0),
    ),
    Scenario.FIGS2_TFIM_RANDOM: dict(
        sizes=(8, 10, 12), metrics=("trace",), realizations=1
    ),
    Scenario.FIGS3_TFIM_PRODUCT: dict(
        sizes=(8, 10, 12),
        metrics=("trace",),
        realizations=1,
        states=("x+", "y+", "z+", "neel"),
    ),
    Scenario.FIGS4_QUENCH: dict(
        sizes=(96,),
        subsystem_ratios=(0.125, 0.25, 0.375, 0.5),
        metrics=("bures", "schatten2", "nschatten2", "relative"),
        realizations=1,
    ),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete description of one sweep; round-trips through YAML."""

    scenario: Scenario
    sizes: Tuple[int, ...] = (8, 10, 12)
    subsystem_ratios: Tuple[float, ...] = (0.25, 0.5, 0.75)
    metrics: Tuple[str, ...] = ("trace",)
    realizations: int = 1
    base_seed: int = 11
    workers: int = 1
    time_samples: int = 200
    #: override of the per-scenario window [a*L, b*L]; None = hard-wired
    window_factors: Optional[Tuple[float, float]] = None
    #: product-state scenarios: which initial states to sweep
    states: Tuple[str, ...] = ()
    #: disordered scenarios: disorder strengths h to sweep
    h_values: Tuple[float, ...] = ()
    #: also emit per-time rows (at the largest L) for trace plots
    emit_series: bool = True

    def __post_init__(self):
        object.__setattr__(self, "scenario", Scenario(self.scenario))
        object.__setattr__(self, "sizes", tuple(int(L) for L in self.sizes))
        object.__setattr__(
            self, "subsystem_ratios", tuple(float(x) for x in self.subsystem_ratios)
        )
        object.__setattr__(self, "metrics", tuple(str(m) for m in self.metrics))
        object.__setattr__(self, "states", tuple(str(s) for s in self.states))
        object.__setattr__(
            self, "h_values", tuple(float(h) for h in self.h_values)
        )
        if self.window_factors is not None:
            a, b = self.window_factors
            object.__setattr__(self, "window_factors", (float(a), float(b)))

    # -- construction ----------------------------------------------------

    @classmethod
    def default(cls, scenario: Scenario) -> "ExperimentConfig":
        """Desk-scale defaults for a scenario."""
        return cls(scenario=Scenario(scenario), **_DEFAULTS[Scenario(scenario)])

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a mapping")
        if "scenario" not in data:
            raise ConfigError("config is missing the 'scenario' key")
        try:
            scenario = Scenario(data["scenario"])
        except ValueError:
            raise ConfigError(f"unknown scenario {data['scenario']!r}")
        known = {f.name for f in dataclasses.fields(cls)}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        merged = dict(_DEFAULTS[scenario])
        merged.update(data)
        merged["scenario"] = scenario
        if "window_factors" in merged and merged["window_factors"] is not None:
            merged["window_factors"] = tuple(merged["window_factors"])
        for key in ("sizes", "subsystem_ratios", "metrics", "states", "h_values"):
            if key in merged and merged[key] is not None:
                merged[key] = tuple(merged[key])
        try:
            return cls(**merged)
        except TypeError as exc:
            raise ConfigError(str(exc))

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["scenario"] = self.scenario.value
        for key in ("sizes", "subsystem_ratios", "metrics", "states", "h_values"):
            out[key] = list(out[key])
        if out["window_factors"] is not None:
            out["window_factors"] = list(out["window_factors"])
        return out

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as f:
            try:
                data = yaml.safe_load(f)
            except yaml.YAMLError as exc:
                raise ConfigError(f"cannot parse {path}: {exc}")
        return cls.from_dict(data)

    def save(self, path) -> None:
        with open(path, "w") as f:
            yaml.safe_dump(self.to_dict(), f, sort_keys=False)

    # -- derived quantities ----------------------------------------------

    @property
    def effective_window(self) -> Tuple[float, float]:
        if self.window_factors is not None:
            return self.window_factors
        return WINDOW_FACTORS[self.scenario]

    def window_for(self, L: int) -> Tuple[float, float]:
        a, b = self.effective_window
        return (a * L, b * L)

    def block_lengths(self, L: int) -> Tuple[int, ...]:
        """Distinct L_A values from the ratios, clipped to 1..L-1."""
        blocks = []
        for x in self.subsystem_ratios:
            la = int(round(x * L))
            la = min(max(la, 1), L - 1)
            if la not in blocks:
                blocks.append(la)
        return tuple(blocks)

    # -- validation ------------------------------------------------------

    def validate(self) -> None:
        """Raise ConfigError on any incomplete or inconsistent setting."""
        if not self.sizes:
            raise ConfigError("sizes must be nonempty")
        if any(L < 2 for L in self.sizes):
            raise ConfigError("every L must be at least 2")
        if not self.metrics:
            raise ConfigError("metrics must be nonempty")
        valid_metrics = {m.value for m in MetricKind}
        bad = [m for m in self.metrics if m not in valid_metrics]
        if bad:
            raise ConfigError(f"unknown metrics {bad}; choose from {sorted(valid_metrics)}")
        if not self.subsystem_ratios:
            raise ConfigError("subsystem_ratios must be nonempty")
        if any(not 0.0 < x < 1.0 for x in self.subsystem_ratios):
            raise ConfigError("subsystem ratios must lie strictly in (0, 1)")
        if self.realizations < 1:
            raise ConfigError("realizations must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.time_samples < 2:
            raise ConfigError("time_samples must be >= 2")
        if self.window_factors is not None:
            a, b = self.window_factors
            if not (0.0 <= a < b):
                raise ConfigError("window_factors must satisfy 0 <= a < b")
        sc = self.scenario
        if sc in (Scenario.FIG2_PRODUCT, Scenario.FIGS3_TFIM_PRODUCT):
            if not self.states:
                raise ConfigError("product-state scenarios need a nonempty 'states'")
            bad = [s for s in self.states if s not in _PRODUCT_STATES]
            if bad:
                raise ConfigError(f"unknown states {bad}; choose from {_PRODUCT_STATES}")
        if sc in (Scenario.FIG3_XXZ, Scenario.FIGS1_TRANSITION):
            if not self.h_values:
                raise ConfigError("XXZ scenarios need a nonempty 'h_values'")
            if any(h < 0 for h in self.h_values):
                raise ConfigError("disorder strengths must be >= 0")
            if any(L % 2 for L in self.sizes):
                raise ConfigError("the Neel state needs even L")
        if sc is Scenario.FIGS4_QUENCH:
            if any(L % 2 for L in self.sizes):
                raise ConfigError("the quench scenario needs even L")
            if any(x > 0.5 for x in self.subsystem_ratios):
                raise ConfigError(
                    "quench blocks are limited to half the chain (the "
                    "covariance fidelity degrades for larger blocks)"
                )
            if "trace" in self.metrics:
                raise ConfigError(
                    "trace distance has no Gaussian evaluation; "
                    "use bures/schatten2/nschatten2/relative"
                )


def list_scenarios() -> list:
    """(name, one-line description) pairs for the CLI."""
    return [
        (Scenario.FIG1_RANDOM.value, "chaotic Ising, random state: D_A^ss and v_A vs x"),
        (Scenario.FIG2_PRODUCT.value, "chaotic Ising, product states: <v_A>/v_tot vs x"),
        (Scenario.FIG3_XXZ.value, "disordered XXZ, Neel state: three-fold averaged speeds"),
        (Scenario.FIGS1_TRANSITION.value, "XXZ disorder sweep across the ETH-MBL transition"),
        (Scenario.FIGS2_TFIM_RANDOM.value, "TFIM, random state: D_A^ss and v_A vs x"),
        (Scenario.FIGS3_TFIM_PRODUCT.value, "TFIM, product states: <v_A>/v_tot vs x"),
        (Scenario.FIGS4_QUENCH.value, "TFIM quench h0->h1: Gaussian distances at L=96"),
    ]
