"""Run configuration with explicit physical units.

Every frequency and time in a config file carries its unit (``"25 MHz"``,
``"10 ns"``).  Values are normalised to GHz and ns.  Unknown keys are
errors.
"""
from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

FREQ_UNITS = {"hz": 1e-9, "khz": 1e-6, "mhz": 1e-3, "ghz": 1.0}
TIME_UNITS = {"ps": 1e-3, "ns": 1.0, "us": 1e3}
_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z]+)\s*$")


class ConfigError(ValueError):
    pass


def parse_quantity(text: Any, units: Mapping[str, float], what: str) -> float:
    if isinstance(text, bool) or not isinstance(text, str):
        raise ConfigError(f"{what}: expected a value with units like '10 ns', got {text!r}")
    m = _QUANTITY.match(text)
    if not m or m.group(2).lower() not in units:
        raise ConfigError(f"{what}: cannot parse {text!r}; allowed units {sorted(units)}")
    return float(m.group(1)) * units[m.group(2).lower()]


def frequency(text: Any, what: str = "frequency") -> float:
    return parse_quantity(text, FREQ_UNITS, what)


def duration(text: Any, what: str = "time") -> float:
    return parse_quantity(text, TIME_UNITS, what)


def _fmt_ghz(x: float) -> str:
    return f"{x:.10g} GHz"


def _fmt_ns(x: float) -> str:
    return f"{x:.10g} ns"


SWEEP_UNIT_KIND = {"tunneling": "f", "coupling_all": "f", "control_bias": "f",
                   "pulse_magnitudes": "f", "tau": "t", "dt": "t"}


@dataclass
class RunConfig:
    lattice: str = "testbed-9q"
    tunneling: float = 0.025
    couplings: tuple[float, ...] | None = None
    control_bias: float = 2.0
    tau: float = 10.0
    dt: float = 0.1
    bias_mode: str = "uniform"
    split: bool = False
    gate_kind: str = "four-active"
    pulses: tuple[float, ...] | str | None = None
    active: str | None = None
    flip_configs: tuple[str, ...] | None = None
    sweep_parameter: str | None = None
    sweep_values: tuple[float, ...] = ()
    workers: int = 1
    surface_rows: int = 5
    surface_cols: int = 5
    xi_z: float = 0.4
    xi_x: float = 0.6
    errors: tuple[str, ...] = ()
    out: str = "."
    source: str | None = field(default=None, compare=False)

    def to_dict(self) -> dict:
        """Resolved config with units, in the same layout the loader reads."""
        params = {
            "tunneling": _fmt_ghz(self.tunneling),
            "control_bias": _fmt_ghz(self.control_bias),
            "tau": _fmt_ns(self.tau),
            "dt": _fmt_ns(self.dt),
            "bias_mode": self.bias_mode,
            "split": self.split,
        }
        if self.couplings is not None:
            params["couplings"] = [_fmt_ghz(x) for x in self.couplings]
        gate: dict[str, Any] = {"kind": self.gate_kind}
        if isinstance(self.pulses, tuple):
            gate["pulses"] = [_fmt_ghz(x) for x in self.pulses]
        elif self.pulses is not None:
            gate["pulses"] = self.pulses
        if self.active is not None:
            gate["active"] = self.active
        if self.flip_configs is not None:
            gate["flip_configs"] = list(self.flip_configs)
        out: dict[str, Any] = {"lattice": self.lattice, "params": params, "gate": gate}
        if self.sweep_parameter:
            fmt = _fmt_ns if SWEEP_UNIT_KIND[self.sweep_parameter] == "t" else _fmt_ghz
            out["sweep"] = {"parameter": self.sweep_parameter,
                            "values": [fmt(v) for v in self.sweep_values],
                            "workers": self.workers}
        out["surface"] = {"rows": self.surface_rows, "cols": self.surface_cols,
                          "xi_z": _fmt_ghz(self.xi_z), "xi_x": _fmt_ghz(self.xi_x),
                          "errors": list(self.errors)}
        return out


_TOP_KEYS = {"lattice", "params", "gate", "sweep", "surface", "output"}
_PARAM_KEYS = {"tunneling", "couplings", "control_bias", "tau", "dt", "bias_mode", "split"}
_GATE_KEYS = {"kind", "pulses", "active", "flip_configs", "spec_file"}
_SWEEP_KEYS = {"parameter", "values", "range", "workers"}
_RANGE_KEYS = {"start", "stop", "points"}
_SURFACE_KEYS = {"rows", "cols", "xi_z", "xi_x", "errors"}
_OUTPUT_KEYS = {"dir"}


def _section(data: Any, keys: set[str], name: str) -> dict:
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{name}: expected a mapping")
    unknown = sorted(set(data) - keys)
    if unknown:
        raise ConfigError(f"{name}: unknown keys {unknown}")
    return data


def _int(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{what}: expected an integer, got {value!r}")
    return value


def config_from_dict(data: Mapping, base_dir: Path | None = None) -> RunConfig:
    top = _section(dict(data), _TOP_KEYS, "config")
    cfg = RunConfig()
    if "lattice" in top:
        lat = str(top["lattice"]).strip().lower()
        if lat not in ("testbed-9q", "surface"):
            raise ConfigError(f"lattice: expected 'testbed-9q' or 'surface', got {lat!r}")
        cfg.lattice = lat

    p = _section(top.get("params"), _PARAM_KEYS, "params")
    if "tunneling" in p:
        cfg.tunneling = frequency(p["tunneling"], "params.tunneling")
    if "control_bias" in p:
        cfg.control_bias = frequency(p["control_bias"], "params.control_bias")
    if "tau" in p:
        cfg.tau = duration(p["tau"], "params.tau")
    if "dt" in p:
        cfg.dt = duration(p["dt"], "params.dt")
    if "couplings" in p:
        xs = p["couplings"]
        if not isinstance(xs, list) or len(xs) != 4:
            raise ConfigError("params.couplings: expected a list of four frequencies (A, B, C, D)")
        cfg.couplings = tuple(frequency(x, "params.couplings") for x in xs)
    if "bias_mode" in p:
        if p["bias_mode"] not in ("uniform", "freeze"):
            raise ConfigError("params.bias_mode: expected 'uniform' or 'freeze'")
        cfg.bias_mode = p["bias_mode"]
    if "split" in p:
        if not isinstance(p["split"], bool):
            raise ConfigError("params.split: expected true or false")
        cfg.split = p["split"]

    g = dict(_section(top.get("gate"), _GATE_KEYS, "gate"))
    if "spec_file" in g:
        path = Path(g.pop("spec_file"))
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        try:
            extra = yaml.safe_load(path.read_text())
        except OSError as exc:
            raise ConfigError(f"gate.spec_file: {exc}") from exc
        g.update(_section(extra, {"active", "flip_configs"}, "gate spec file"))
    if "kind" in g:
        kinds = ("four-active", "two-active-vertical", "two-active-horizontal", "cnot", "general")
        if g["kind"] not in kinds:
            raise ConfigError(f"gate.kind: expected one of {kinds}")
        cfg.gate_kind = g["kind"]
    if "pulses" in g:
        if g["pulses"] == "rescaled":
            cfg.pulses = "rescaled"
        elif isinstance(g["pulses"], list):
            cfg.pulses = tuple(frequency(x, "gate.pulses") for x in g["pulses"])
        else:
            raise ConfigError("gate.pulses: expected a list of frequencies or 'rescaled'")
    if "active" in g:
        act = str(g["active"]).upper()
        if not act or set(act) - set("ABCD") or len(set(act)) != len(act):
            raise ConfigError("gate.active: expected distinct letters from ABCD")
        cfg.active = act
    if "flip_configs" in g:
        fc = g["flip_configs"]
        if not isinstance(fc, list) or any(not re.fullmatch(r"[01]{4}", str(c)) for c in fc):
            raise ConfigError("gate.flip_configs: expected a list of 4-bit strings like '1000'")
        cfg.flip_configs = tuple(str(c) for c in fc)
    if cfg.gate_kind == "general" and (cfg.active is None) == (cfg.flip_configs is None):
        raise ConfigError("general gate needs exactly one of gate.active or gate.flip_configs")

    s = _section(top.get("sweep"), _SWEEP_KEYS, "sweep")
    if s:
        param = s.get("parameter")
        if param not in SWEEP_UNIT_KIND:
            raise ConfigError(f"sweep.parameter: expected one of {sorted(SWEEP_UNIT_KIND)}")
        conv = duration if SWEEP_UNIT_KIND[param] == "t" else frequency
        if ("values" in s) == ("range" in s):
            raise ConfigError("sweep: give exactly one of 'values' or 'range'")
        if "values" in s:
            if not isinstance(s["values"], list) or not s["values"]:
                raise ConfigError("sweep.values: expected a non-empty list")
            values = [conv(v, "sweep.values") for v in s["values"]]
        else:
            r = _section(s["range"], _RANGE_KEYS, "sweep.range")
            if set(r) != _RANGE_KEYS:
                raise ConfigError("sweep.range: needs start, stop and points")
            start, stop = conv(r["start"], "sweep.range.start"), conv(r["stop"], "sweep.range.stop")
            points = _int(r["points"], "sweep.range.points")
            if points < 1:
                raise ConfigError("sweep.range.points must be positive")
            values = [start] if points == 1 else [start + (stop - start) * k / (points - 1)
                                                  for k in range(points)]
        cfg.sweep_parameter = param
        cfg.sweep_values = tuple(round(v, 12) for v in values)
        if "workers" in s:
            cfg.workers = _int(s["workers"], "sweep.workers")

    sf = _section(top.get("surface"), _SURFACE_KEYS, "surface")
    if "rows" in sf:
        cfg.surface_rows = _int(sf["rows"], "surface.rows")
    if "cols" in sf:
        cfg.surface_cols = _int(sf["cols"], "surface.cols")
    if "xi_z" in sf:
        cfg.xi_z = frequency(sf["xi_z"], "surface.xi_z")
    if "xi_x" in sf:
        cfg.xi_x = frequency(sf["xi_x"], "surface.xi_x")
    if "errors" in sf:
        errs = sf["errors"]
        if not isinstance(errs, list) or any(not re.fullmatch(r"[XYZ] \S+", str(e)) for e in errs):
            raise ConfigError("surface.errors: expected entries like 'X D6'")
        cfg.errors = tuple(errs)

    o = _section(top.get("output"), _OUTPUT_KEYS, "output")
    if "dir" in o:
        cfg.out = str(o["dir"])
    return cfg


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    cfg = config_from_dict(data or {}, path.parent)
    return dataclasses.replace(cfg, source=str(path))
