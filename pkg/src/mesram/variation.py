"""Monte-Carlo process-variation engine.

Gaussian multiplicative perturbations (3-sigma given as a percentage)
are applied to a behavioral margin model: bit-line rail/midpoint
levels, sense references, and the two resistance states.  Transistor
width/length/threshold variations enter through an explicit linear
sensitivity table mapping them onto those margin proxies.  Each
(seed, trial, parameter) triple owns its own counter-based substream,
so campaigns are bit-identical regardless of evaluation order.

Failures are decision flips: a midpoint misread as a rail because the
perturbed reference crossed the perturbed line level, or a restore race
resolving the wrong way because the perturbed device resistance crossed
the perturbed reference resistance.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field, replace

import numpy as np

from .cell import READ_SENSE_FRACTION
from .device import MefetParams
from .errors import InvalidInputError

PARAM_IDS = (
    "width-proxy",
    "length-proxy",
    "vth-proxy",
    "r_on",
    "r_off",
    "vref1",
    "vref2",
    "vref3",
    "rbl_divider_gain",
)

WORKLOADS = ("read", "write", "store_restore", "xor_all_inputs")


@dataclass(frozen=True)
class SensitivityTable:
    """Linear coupling of transistor proxies into margin voltages.

    A fractional parameter deviation delta shifts a level L to
    L * (1 + s * delta).  Defaults are small: the published cell keeps
    wide decision margins, and the SPICE study reports no failures in
    the tested range.
    """

    level_width: float = 0.05
    level_length: float = 0.05
    level_vth: float = 0.05
    level_gain: float = 0.05
    vref: float = 0.05
    snm: float = 0.05


@dataclass(frozen=True)
class VariationSpec:
    three_sigma_pct: float = 30.0
    perturbed: tuple = PARAM_IDS
    iterations: int = 1000
    seed: int = 1
    cols: int = 256
    vdd: float = 0.8
    sensitivity: SensitivityTable = field(default_factory=SensitivityTable)

    def __post_init__(self):
        if not (0.0 <= self.three_sigma_pct <= 70.0):
            raise InvalidInputError("three_sigma_pct must be in [0, 70]")
        if self.iterations < 1:
            raise InvalidInputError("iterations must be >= 1")

    @property
    def sigma(self) -> float:
        return self.three_sigma_pct / 3.0 / 100.0


@dataclass(frozen=True)
class McResult:
    op: str
    failures: int
    trials: int
    per_sigma_curve: tuple = ()

    @property
    def failure_rate(self) -> float:
        return self.failures / self.trials if self.trials else 0.0


def _delta(spec: VariationSpec, trial: int, param_id: str,
           size: int | None = None):
    """Deterministic N(0, sigma^2) draw keyed by (seed, trial, param)."""
    key = zlib.crc32(param_id.encode())
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed, trial, key]))
    if spec.sigma == 0.0:
        return 0.0 if size is None else np.zeros(size)
    return rng.normal(0.0, spec.sigma, size=size)


def perturb(nominal: dict, spec: VariationSpec, trial: int) -> dict:
    """Multiply each selected nominal value by (1 + delta)."""
    out = dict(nominal)
    for pid, value in nominal.items():
        if pid in spec.perturbed:
            out[pid] = value * (1.0 + _delta(spec, trial, pid))
    return out


def _level_dev(spec: VariationSpec, trial: int, suffix: str) -> np.ndarray:
    """Combined fractional level shift per column from transistor proxies."""
    s = spec.sensitivity
    dev = np.zeros(spec.cols)
    for pid, gain in (("width-proxy", s.level_width),
                      ("length-proxy", -s.level_length),
                      ("vth-proxy", s.level_vth),
                      ("rbl_divider_gain", s.level_gain)):
        if pid in spec.perturbed:
            dev += gain * _delta(spec, trial, f"{pid}/{suffix}", spec.cols)
    return dev


def _vref(spec: VariationSpec, trial: int, name: str, nominal: float,
          overrides: dict | None) -> np.ndarray:
    if overrides and name in overrides:
        nominal = overrides[name]
    if name in spec.perturbed:
        dev = spec.sensitivity.vref * _delta(spec, trial, name, spec.cols)
        return nominal * (1.0 + dev)
    return np.full(spec.cols, nominal)


def _xor_trial(spec: VariationSpec, trial: int,
               overrides: dict | None) -> tuple[int, int]:
    vdd = spec.vdd
    vref1 = _vref(spec, trial, "vref1", 0.25 * vdd, overrides)
    vref2 = _vref(spec, trial, "vref2", 0.75 * vdd, overrides)
    failures = 0
    trials = 0
    for a in (0, 1):
        for b in (0, 1):
            suffix = f"lvl{a}{b}"
            dev = _level_dev(spec, trial, suffix)
            if a == b:
                level = 0.5 * vdd * (1.0 + dev)
            elif a == 1:
                level = vdd * (1.0 + dev)
            else:
                level = vdd * np.abs(dev)  # ground rail plus residual offset
            decoded = (level < vref1) | (level > vref2)
            failures += int(np.count_nonzero(decoded != bool(a ^ b)))
            trials += spec.cols
    return failures, trials


def _read_trial(spec: VariationSpec, trial: int,
                overrides: dict | None) -> tuple[int, int]:
    vdd = spec.vdd
    vref3 = _vref(spec, trial, "vref3", 0.5 * vdd, overrides)
    failures = 0
    trials = 0
    for stored in (0, 1):
        dev = _level_dev(spec, trial, f"read{stored}")
        if stored == 1:
            # QB=0: the line keeps its precharge (sensed before the
            # 10% discharge point)
            level = vdd * (1.0 - 0.5 * READ_SENSE_FRACTION) * (1.0 + dev)
        else:
            # QB=1: the read port has pulled the line to its residual
            level = vdd * READ_SENSE_FRACTION * (1.0 + dev)
        decoded = level > vref3
        failures += int(np.count_nonzero(decoded != bool(stored)))
        trials += spec.cols
    return failures, trials


def _write_trial(spec: VariationSpec, trial: int,
                 overrides: dict | None) -> tuple[int, int]:
    # writability proxy: the equalized node voltage must stay on the
    # correct side of the latch trip point for the driven polarity
    vdd = spec.vdd
    trip = _vref(spec, trial, "vref3", 0.5 * vdd, overrides)
    failures = 0
    trials = 0
    for bit in (0, 1):
        dev = _level_dev(spec, trial, f"write{bit}")
        driven = vdd * (1.0 + dev) if bit else vdd * np.abs(dev)
        decoded = driven > trip
        failures += int(np.count_nonzero(decoded != bool(bit)))
        trials += spec.cols
    return failures, trials


def _store_restore_trial(spec: VariationSpec, trial: int,
                         overrides: dict | None,
                         p: MefetParams) -> tuple[int, int]:
    failures = 0
    trials = 0
    for bit in (0, 1):
        base = p.r_off if bit else p.r_on
        pid = "r_off" if bit else "r_on"
        d_me = _delta(spec, trial, f"{pid}/me{bit}", spec.cols) \
            if pid in spec.perturbed else np.zeros(spec.cols)
        d_ref_on = _delta(spec, trial, f"r_on/ref{bit}", spec.cols) \
            if "r_on" in spec.perturbed else np.zeros(spec.cols)
        d_ref_off = _delta(spec, trial, f"r_off/ref{bit}", spec.cols) \
            if "r_off" in spec.perturbed else np.zeros(spec.cols)
        r_me = base * (1.0 + d_me)
        r_ref = 0.5 * (p.r_on * (1.0 + d_ref_on) + p.r_off * (1.0 + d_ref_off))
        restored = r_me > r_ref
        failures += int(np.count_nonzero(restored != bool(bit)))
        trials += spec.cols
    return failures, trials


_TRIAL_FNS = {
    "read": _read_trial,
    "write": _write_trial,
    "xor_all_inputs": _xor_trial,
}


def run_campaign(spec: VariationSpec, workload: str,
                 overrides: dict | None = None,
                 params: MefetParams | None = None) -> McResult:
    """Run the full campaign for one workload at one sigma point."""
    if workload not in WORKLOADS:
        raise InvalidInputError(f"unknown workload {workload!r}")
    params = params or MefetParams()
    failures = 0
    trials = 0
    for trial in range(spec.iterations):
        if workload == "store_restore":
            f, t = _store_restore_trial(spec, trial, overrides, params)
        else:
            f, t = _TRIAL_FNS[workload](spec, trial, overrides)
        failures += f
        trials += t
    rate = failures / trials if trials else 0.0
    return McResult(op=workload, failures=failures, trials=trials,
                    per_sigma_curve=((spec.three_sigma_pct, rate),))


def sweep_campaign(spec: VariationSpec, workload: str, sigmas,
                   overrides: dict | None = None,
                   params: MefetParams | None = None) -> McResult:
    """Sweep three_sigma_pct and collect the failure-rate curve."""
    curve = []
    failures = 0
    trials = 0
    for s in sigmas:
        res = run_campaign(replace(spec, three_sigma_pct=float(s)),
                           workload, overrides, params)
        curve.append(res.per_sigma_curve[0])
        failures += res.failures
        trials += res.trials
    return McResult(op=workload, failures=failures, trials=trials,
                    per_sigma_curve=tuple(curve))


def margin_samples(spec: VariationSpec, which: str) -> np.ndarray:
    """Model-derived noise-margin histograms (not SPICE reproductions).

    Returns one sample per iteration of the published margin constant
    shifted by the threshold-voltage proxy.
    """
    nominal = {"rsnm": 288.0, "cwlm": 374.8, "hsnm": 288.0}[which]
    s = spec.sensitivity.snm
    out = np.empty(spec.iterations)
    for trial in range(spec.iterations):
        out[trial] = nominal * (1.0 + s * _delta(spec, trial, f"snm/{which}"))
    return out
