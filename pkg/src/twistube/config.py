"""Run configuration: strict JSON ingestion with documented defaults.

The schema is described in docs/config_schema.md. Unknown keys are
rejected by name; values outside the slight-transformation regime are
hard errors.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import HelixCurve, TabulatedCurve, TransformProfile


class ConfigError(Exception):
    pass


def _check_keys(block: dict, allowed: set[str], where: str):
    for key in block:
        if key not in allowed:
            raise ConfigError(f"unknown key '{key}' in '{where}' "
                              f"(allowed: {', '.join(sorted(allowed))})")


def _require(block: dict, key: str, where: str):
    if key not in block:
        raise ConfigError(f"missing key '{key}' in '{where}'")
    return block[key]


def _positive(value, name: str) -> float:
    v = float(value)
    if v <= 0:
        raise ConfigError(f"'{name}' must be positive, got {value}")
    return v


@dataclass(frozen=True)
class ProfileSpec:
    kind: str
    delta: float
    omega: float
    f_form: str       # "const" or "sin"
    f_value: float    # constant value or sine amplitude
    f_periods: float
    f1_value: float | None = None
    f2_value: float | None = None

    def f_function(self, s0: float):
        if self.f_form == "const":
            v = self.f_value
            return (lambda s: v), (lambda s: 0.0)
        amp, per = self.f_value, self.f_periods
        k = 2.0 * np.pi * per / s0
        return (lambda s: amp * np.sin(k * s)), (lambda s: amp * k * np.cos(k * s))

    def build(self, s0: float) -> TransformProfile:
        om = self.omega
        theta = (lambda s: om * s)
        theta_dot = (lambda s: om)
        if self.kind == "rotation":
            return TransformProfile.rotation(theta, theta_dot=theta_dot,
                                             delta=self.delta)
        if self.kind == "combined":
            f, f_dot = self.f_function(s0)
            return TransformProfile.combined(theta, f, self.delta,
                                             theta_dot=theta_dot, f_dot=f_dot)
        if self.kind == "shearing":
            f, f_dot = self.f_function(s0)
            return TransformProfile.shearing(f, self.delta, f_dot=f_dot)
        if self.kind == "scaling":
            f1 = 0.0 if self.f1_value is None else self.f1_value
            f2 = 0.0 if self.f2_value is None else self.f2_value
            return TransformProfile.scaling(f1, f2, self.delta,
                                            f1_dot=lambda s: 0.0,
                                            f2_dot=lambda s: 0.0)
        raise ConfigError(f"unknown profile kind '{self.kind}'")


@dataclass(frozen=True)
class RunConfig:
    curve_kind: str
    curve_params: dict
    profile: ProfileSpec
    cross_kind: str
    cross_size: float
    n1: int
    n2: int
    circ_n: int
    circ_l: int
    length: float
    points: int
    bc: str
    field_resolution: int
    energy: float | str
    out_dir: str
    out_format: str
    figures: bool
    coupling_includes_delta: bool

    def build_curve(self):
        if self.curve_kind == "helix":
            return HelixCurve(self.curve_params["radius"],
                              self.curve_params["pitch"], length=self.length)
        return TabulatedCurve(self.curve_params["s"], self.curve_params["kappa"],
                              self.curve_params["tau"])

    def build_profile(self) -> TransformProfile:
        return self.profile.build(self.length)


_F_KEYS = {"form", "amplitude", "periods", "value"}


def _parse_f(block, where: str):
    if isinstance(block, (int, float)):
        return "const", float(block), 1.0
    _check_keys(block, _F_KEYS, where)
    form = block.get("form", "const")
    if form == "const":
        return "const", float(block.get("value", 0.0)), 1.0
    if form == "sin":
        return "sin", float(block.get("amplitude", 1.0)), float(block.get("periods", 1.0))
    raise ConfigError(f"unknown f form '{form}' in '{where}'")


def parse_config(path) -> RunConfig:
    """Read and validate a JSON run configuration."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    return parse_config_dict(raw)


def parse_config_dict(raw: dict) -> RunConfig:
    _check_keys(raw, {"curve", "profile", "cross_section", "modes", "grid",
                      "energy", "outputs", "conventions"}, "<root>")

    curve = _require(raw, "curve", "<root>")
    _check_keys(curve, {"kind", "radius", "pitch", "s", "kappa", "tau"}, "curve")
    curve_kind = _require(curve, "kind", "curve")
    if curve_kind == "helix":
        params = {"radius": _positive(_require(curve, "radius", "curve"), "curve.radius"),
                  "pitch": float(curve.get("pitch", 0.0))}
    elif curve_kind == "tabulated":
        params = {"s": _require(curve, "s", "curve"),
                  "kappa": _require(curve, "kappa", "curve"),
                  "tau": _require(curve, "tau", "curve")}
    else:
        raise ConfigError(f"unknown curve kind '{curve_kind}'")

    prof = _require(raw, "profile", "<root>")
    _check_keys(prof, {"kind", "delta", "omega", "f", "f1", "f2"}, "profile")
    kind = _require(prof, "kind", "profile")
    if kind not in ("rotation", "scaling", "shearing", "combined"):
        raise ConfigError(f"unknown profile kind '{kind}'")
    delta = float(prof.get("delta", 0.02))
    if not (0.0 < delta <= 0.2) and kind != "rotation":
        raise ConfigError(
            f"delta={delta} outside the slight-transformation regime (0, 0.2]"
        )
    if delta > 0.1:
        warnings.warn(f"delta={delta} above 0.1; expansion accuracy degrades")
    f_form, f_value, f_periods = _parse_f(prof.get("f", 0.0), "profile.f")
    f1 = prof.get("f1")
    f2 = prof.get("f2")
    profile = ProfileSpec(
        kind=kind, delta=delta, omega=float(prof.get("omega", 0.0)),
        f_form=f_form, f_value=f_value, f_periods=f_periods,
        f1_value=None if f1 is None else float(f1),
        f2_value=None if f2 is None else float(f2),
    )

    cross = _require(raw, "cross_section", "<root>")
    _check_keys(cross, {"kind", "side", "radius"}, "cross_section")
    cross_kind = _require(cross, "kind", "cross_section")
    if cross_kind == "square":
        cross_size = _positive(cross.get("side", 1.0), "cross_section.side")
    elif cross_kind == "circular":
        cross_size = _positive(cross.get("radius", 1.0), "cross_section.radius")
    else:
        raise ConfigError(f"unknown cross-section kind '{cross_kind}'")

    modes = raw.get("modes", {})
    _check_keys(modes, {"n1", "n2", "n", "l"}, "modes")
    n1 = int(modes.get("n1", 1))
    n2 = int(modes.get("n2", 2))
    if n1 < 1 or n2 < 1:
        raise ConfigError("mode quantum numbers must be positive")
    circ_n = int(modes.get("n", 1))
    circ_l = int(modes.get("l", 0))

    grid = raw.get("grid", {})
    _check_keys(grid, {"length", "points", "boundary", "field_resolution"}, "grid")
    length = _positive(grid.get("length", 50.0), "grid.length")
    points = int(grid.get("points", 512))
    bc = grid.get("boundary", "periodic")
    if bc not in ("periodic", "dirichlet"):
        raise ConfigError(f"grid.boundary must be 'periodic' or 'dirichlet', got '{bc}'")
    field_resolution = int(grid.get("field_resolution", 64))

    energy = raw.get("energy", "auto")
    if energy != "auto":
        energy = float(energy)
        if energy <= 0:
            raise ConfigError("energy must be positive or 'auto'")

    outputs = raw.get("outputs", {})
    _check_keys(outputs, {"directory", "format", "figures"}, "outputs")
    out_dir = str(outputs.get("directory", "out"))
    out_format = outputs.get("format", "csv")
    if out_format not in ("csv", "json"):
        raise ConfigError(f"outputs.format must be 'csv' or 'json', got '{out_format}'")
    figures = bool(outputs.get("figures", True))

    conventions = raw.get("conventions", {})
    _check_keys(conventions, {"coupling_includes_delta"}, "conventions")
    coupling_includes_delta = bool(conventions.get("coupling_includes_delta", True))

    return RunConfig(
        curve_kind=curve_kind, curve_params=params, profile=profile,
        cross_kind=cross_kind, cross_size=cross_size, n1=n1, n2=n2,
        circ_n=circ_n, circ_l=circ_l, length=length, points=points, bc=bc,
        field_resolution=field_resolution, energy=energy, out_dir=out_dir,
        out_format=out_format, figures=figures, coupling_includes_delta=coupling_includes_delta,
    )
