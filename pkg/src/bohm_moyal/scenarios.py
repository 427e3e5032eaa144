"""Scenario description: a test state on a grid plus run settings.

Scenario files are flat ``key = value`` lines; ``#`` starts a comment.

    kind            gaussian | two_gaussian | plane_wave | pauli_ck
    grid_n          power of two >= 8              (default 256)
    grid_length     period L > 0                   (default 40)
    grid_center     grid center c                  (default 0)
    mass            m > 0                          (default 1)
    derivative      spectral | fd                  (default spectral)
    node_threshold  relative node threshold        (default 1e-12)

plus the state parameters of the chosen kind (see ``KIND_PARAMS``).
Any other key is reported as a configuration error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .exceptions import GridError
from .grid import DEFAULT_NODE_THRESHOLD, Grid, GridField, build_grid
from .pauli import SpinorField, cayley_klein_compose, cayley_klein_state
from .states import gaussian, plane_wave, two_gaussian

KIND_PARAMS: dict[str, dict[str, float]] = {
    "gaussian": {"x0": 0.0, "p0": 0.0, "sigma": 1.0},
    "two_gaussian": {"x0a": -3.0, "x0b": 3.0, "p0a": 0.0, "p0b": 0.0, "sigma": 1.0,
                     "rel_phase": 0.0},
    "plane_wave": {"mode_index": 3},
    "pauli_ck": {"envelope_sigma": 1.0, "p0": 0.0, "theta0": math.pi / 2, "theta_slope": 0.0,
                 "phi0": 0.0, "phi_slope": 0.0},
}
SETTINGS = ("kind", "name", "grid_n", "grid_length", "grid_center", "mass", "derivative",
            "node_threshold")
# keys read by the weak-value query only
QUERY_KEYS = ("operator", "post", "post_x", "post_mode", "post_x0", "post_p0", "post_sigma",
              "potential")


class ScenarioError(ValueError):
    """Invalid scenario configuration."""


@dataclass(frozen=True)
class Scenario:
    kind: str = "gaussian"
    params: Mapping[str, float] = field(default_factory=dict)
    grid_n: int = 256
    grid_length: float = 40.0
    grid_center: float = 0.0
    mass: float = 1.0
    derivative: str = "spectral"
    node_threshold: float = DEFAULT_NODE_THRESHOLD
    name: str = ""
    query: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KIND_PARAMS:
            raise ScenarioError(f"unknown scenario kind {self.kind!r}; "
                                f"expected one of {', '.join(KIND_PARAMS)}")
        unknown = set(self.params) - set(KIND_PARAMS[self.kind])
        if unknown:
            raise ScenarioError(f"parameters {sorted(unknown)} do not apply to kind {self.kind!r}")
        merged = {**KIND_PARAMS[self.kind], **self.params}
        if self.kind == "plane_wave":
            if merged["mode_index"] != int(merged["mode_index"]):
                raise ScenarioError("mode_index must be an integer")
            merged["mode_index"] = int(merged["mode_index"])
        for key in ("sigma", "envelope_sigma"):
            if key in merged and not merged[key] > 0:
                raise ScenarioError(f"{key} must be positive")
        if not self.mass > 0:
            raise ScenarioError("mass must be positive")
        if self.derivative not in ("spectral", "fd"):
            raise ScenarioError("derivative must be 'spectral' or 'fd'")
        if not 0 < self.node_threshold < 1:
            raise ScenarioError("node_threshold must lie in (0, 1)")
        try:
            build_grid(self.grid_n, self.grid_length, self.grid_center)
        except GridError as exc:
            raise ScenarioError(str(exc)) from None
        object.__setattr__(self, "params", merged)
        object.__setattr__(self, "name", self.name or self.kind)

    @property
    def is_spinor(self) -> bool:
        return self.kind == "pauli_ck"

    def grid(self) -> Grid:
        return build_grid(self.grid_n, self.grid_length, self.grid_center)

    def derivative_kw(self) -> dict:
        return {"method": self.derivative}

    def state(self) -> GridField | SpinorField:
        g = self.grid()
        p = self.params
        if self.kind == "gaussian":
            return gaussian(g, p["x0"], p["p0"], p["sigma"])
        if self.kind == "two_gaussian":
            return two_gaussian(g, p["x0a"], p["x0b"], p["p0a"], p["p0b"], p["sigma"],
                                p["rel_phase"])
        if self.kind == "plane_wave":
            try:
                return plane_wave(g, p["mode_index"])
            except GridError as exc:
                raise ScenarioError(str(exc)) from None
        return cayley_klein_compose(self.cayley_klein())

    def cayley_klein(self):
        if not self.is_spinor:
            raise ScenarioError("Cayley-Klein fields exist only for pauli_ck scenarios")
        return cayley_klein_state(self.grid(), **self.params)

    def describe(self) -> dict:
        return {"name": self.name, "kind": self.kind, "params": dict(self.params),
                "mass": self.mass, "derivative": self.derivative,
                "node_threshold": self.node_threshold}

    def with_overrides(self, overrides: Mapping[str, str]) -> "Scenario":
        return from_mapping({**self.as_mapping(), **overrides})

    def as_mapping(self) -> dict[str, str]:
        out = {"kind": self.kind, "name": self.name, "grid_n": str(self.grid_n),
               "grid_length": repr(self.grid_length), "grid_center": repr(self.grid_center),
               "mass": repr(self.mass), "derivative": self.derivative,
               "node_threshold": repr(self.node_threshold)}
        out.update({k: repr(v) for k, v in self.params.items()})
        out.update(self.query)
        return out


def _number(key: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ScenarioError(f"{key} = {text!r} is not a number") from None
    if not math.isfinite(value):
        raise ScenarioError(f"{key} must be finite")
    return value


def from_mapping(values: Mapping[str, str]) -> Scenario:
    """Build a scenario from string key/value pairs (file contents plus overrides)."""
    values = {k.strip(): str(v).strip() for k, v in values.items()}
    kind = values.get("kind", "gaussian")
    allowed = set(SETTINGS) | set(QUERY_KEYS) | set(KIND_PARAMS.get(kind, {}))
    unknown = sorted(set(values) - allowed)
    if unknown:
        raise ScenarioError(f"unknown scenario keys: {', '.join(unknown)}")
    n_text = values.get("grid_n", "256")
    n = _number("grid_n", n_text)
    if n != int(n):
        raise ScenarioError("grid_n must be an integer")
    params = {k: _number(k, values[k]) for k in KIND_PARAMS.get(kind, {}) if k in values}
    return Scenario(
        kind=kind,
        params=params,
        grid_n=int(n),
        grid_length=_number("grid_length", values.get("grid_length", "40")),
        grid_center=_number("grid_center", values.get("grid_center", "0")),
        mass=_number("mass", values.get("mass", "1")),
        derivative=values.get("derivative", "spectral"),
        node_threshold=_number("node_threshold",
                               values.get("node_threshold", repr(DEFAULT_NODE_THRESHOLD))),
        name=values.get("name", ""),
        query={k: values[k] for k in QUERY_KEYS if k in values},
    )


def parse_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ScenarioError(f"line {lineno}: expected 'key = value', got {raw!r}")
        out[key.strip()] = value.strip()
    return out


def load(path: str | Path) -> dict[str, str]:
    try:
        return parse_text(Path(path).read_text())
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc}") from None


def default_scenarios() -> list[Scenario]:
    """The reference set: n = 256, L = 40, spectral derivatives."""
    return [
        Scenario("gaussian", {"x0": 0.0, "p0": 2.0, "sigma": 1.0}, name="gaussian"),
        Scenario("gaussian", {"x0": 1.5, "p0": -1.0, "sigma": 0.7}, mass=2.0,
                 name="gaussian_shifted"),
        Scenario("two_gaussian", {"x0a": -3.0, "x0b": 3.0, "p0a": 1.0, "p0b": -1.0,
                                  "sigma": 1.0, "rel_phase": 0.7}, name="two_gaussian"),
        Scenario("plane_wave", {"mode_index": 3}, name="plane_wave"),
        Scenario("pauli_ck", {"theta0": math.pi / 3, "phi_slope": 0.8}, name="pauli_ck"),
        Scenario("pauli_ck", {"p0": 0.5, "theta0": 1.0, "theta_slope": 0.1, "phi0": 0.3,
                              "phi_slope": 0.6}, name="pauli_ck_tilted"),
    ]


__all__ = ["KIND_PARAMS", "Scenario", "ScenarioError", "default_scenarios", "from_mapping",
           "load", "parse_text"]
