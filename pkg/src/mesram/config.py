"""Flat INI-style run configuration.

Every section has complete defaults (the published values), so an empty
or missing file is a valid configuration.  Unknown sections or keys are
rejected rather than ignored; fixtures stay diff-friendly.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields as dc_fields

from .cell import DEFAULT_COSTS, OpCost
from .device import LlgParams, MefetParams
from .errors import ConfigError
from .hierarchy import HierarchySpec
from .variation import PARAM_IDS, SensitivityTable, VariationSpec

_DEVICE_KEYS = {f.name for f in dc_fields(MefetParams)} \
    | {f.name for f in dc_fields(LlgParams)}
_VEC_KEYS = {"h_ext", "easy_axis"}
_COST_KEYS = {f"{op}_{kind}" for op in DEFAULT_COSTS for kind in ("delay", "power")}
_HIER_KEYS = {f.name for f in dc_fields(HierarchySpec)}
_MC_KEYS = {"three_sigma_pct", "iterations", "seed", "cols", "vdd", "perturbed"}
_WORKLOAD_KEYS = {"net", "scale", "adder_energy_per_bit"}

_SECTIONS = {
    "device": _DEVICE_KEYS,
    "costs": _COST_KEYS,
    "hierarchy": _HIER_KEYS,
    "montecarlo": _MC_KEYS,
    "workload": _WORKLOAD_KEYS,
}


@dataclass
class RunConfig:
    mefet: MefetParams = field(default_factory=MefetParams)
    llg: LlgParams = field(default_factory=LlgParams)
    costs: dict = field(default_factory=lambda: dict(DEFAULT_COSTS))
    hierarchy: HierarchySpec = field(default_factory=HierarchySpec)
    montecarlo: VariationSpec = field(default_factory=VariationSpec)
    workload_net: str | None = None
    workload_scale: int = 16
    adder_energy_per_bit: float = 0.0
    seed: int = 1


def _parse_vec(text: str) -> tuple:
    parts = [float(x) for x in text.replace(",", " ").split()]
    if len(parts) != 3:
        raise ConfigError(f"expected 3 components, got {text!r}")
    return tuple(parts)


def _coerce(section: str, key: str, text: str):
    if key in _VEC_KEYS:
        return _parse_vec(text)
    if key == "perturbed":
        ids = tuple(x.strip() for x in text.split(",") if x.strip())
        bad = [x for x in ids if x not in PARAM_IDS]
        if bad:
            raise ConfigError(f"unknown perturbed parameter ids {bad}")
        return ids
    if key == "net":
        return text
    if key in ("iterations", "seed", "cols", "scale", "banks", "ways",
               "matrices_per_bank", "subarray_rows", "subarray_cols",
               "slice_capacity", "bank_capacity", "matrix_capacity",
               "compute_subarray"):
        return int(text)
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: not a number: {text!r}") from None


def load_config(path=None, seed: int | None = None) -> RunConfig:
    """Parse an INI file into a RunConfig; path=None yields defaults."""
    raw: dict[str, dict] = {name: {} for name in _SECTIONS}
    if path is not None:
        parser = configparser.ConfigParser()
        read = parser.read(str(path))
        if not read:
            raise ConfigError(f"cannot read config file {path}")
        for section in parser.sections():
            if section not in _SECTIONS:
                raise ConfigError(f"unknown section [{section}]")
            for key, value in parser.items(section):
                if key not in _SECTIONS[section]:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                raw[section][key] = _coerce(section, key, value)

    dev = raw["device"]
    mefet_kwargs = {k: v for k, v in dev.items()
                    if k in {f.name for f in dc_fields(MefetParams)}}
    llg_kwargs = {k: v for k, v in dev.items()
                  if k in {f.name for f in dc_fields(LlgParams)}}
    try:
        mefet = MefetParams(**mefet_kwargs)
        llg = LlgParams(**llg_kwargs)
        hierarchy = HierarchySpec(**raw["hierarchy"])
        hierarchy.validate()
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(str(exc)) from exc

    costs = dict(DEFAULT_COSTS)
    for op in DEFAULT_COSTS:
        delay = raw["costs"].get(f"{op}_delay", costs[op].delay)
        power = raw["costs"].get(f"{op}_power", costs[op].power)
        costs[op] = OpCost(op, delay, power)

    mc_kwargs = dict(raw["montecarlo"])
    if seed is not None:
        mc_kwargs["seed"] = seed
    try:
        montecarlo = VariationSpec(sensitivity=SensitivityTable(), **mc_kwargs)
    except Exception as exc:
        raise ConfigError(str(exc)) from exc

    wl = raw["workload"]
    return RunConfig(
        mefet=mefet,
        llg=llg,
        costs=costs,
        hierarchy=hierarchy,
        montecarlo=montecarlo,
        workload_net=wl.get("net"),
        workload_scale=int(wl.get("scale", 16)),
        adder_energy_per_bit=float(wl.get("adder_energy_per_bit", 0.0)),
        seed=seed if seed is not None else int(mc_kwargs.get("seed", 1)),
    )
