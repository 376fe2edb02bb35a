"""Command-line front end.

Subcommands map onto the simulator layers: ``device`` (switching
studies), ``cell`` (bit-cell operation traces), ``compute`` (bit-line
X(N)OR demos), ``mc`` (variation campaigns), ``bnn`` (binarized-CNN
workload reports).  Every command is deterministic under a fixed seed,
writes its delimited payloads atomically, and renders companion
matplotlib figures beside them.

Exit codes: 0 success, 1 check failure, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import bnn, cell, device, figures, variation
from .config import RunConfig, load_config
from .errors import ConfigError, MesramError
from .hierarchy import build_hierarchy
from .ledger import EnergyLatencyLedger, account
from .subarray import SenseAmpConfig, SenseMode, SubArray, evaluate_rbl, sense


def _atomic_write(path: Path, data: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(data)
    os.replace(tmp, path)


def _write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _atomic_write(path, buf.getvalue())


def _write_summary(path_base: Path, obj: dict, fmt: str) -> Path:
    if fmt == "json":
        path = path_base.with_suffix(".json")
        _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")
    else:
        path = path_base.with_suffix(".csv")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        for key in sorted(obj):
            writer.writerow([key, obj[key]])
        _atomic_write(path, buf.getvalue())
    return path


def _data_path(name: str) -> Path:
    return Path(resources.files("mesram") / "data" / name)


def load_baselines(path=None) -> list[bnn.CostBaseline]:
    path = Path(path) if path else _data_path("baselines.csv")
    out = []
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh)
                if r and not r[0].lstrip().startswith("#")]
    header = rows[0]
    if header != ["name", "relative_time", "relative_energy"]:
        raise ConfigError(f"unexpected baseline columns {header}")
    for row in rows[1:]:
        name, rt, re_ = (row + ["", ""])[:3]
        out.append(bnn.CostBaseline(
            name=name,
            relative_time=float(rt) if rt else None,
            relative_energy=float(re_) if re_ else None,
        ))
    return out


def cmd_device(cfg: RunConfig, args, out: Path) -> int:
    p, lp = cfg.mefet, cfg.llg
    summary: dict = {
        "me_capacitance_f": device.me_capacitance(p),
        "gate_time_constant_s": device.gate_time_constant(p),
    }
    if args.sweep == "temp":
        values = args.values or [0.0, 150.0, 300.0]
        rows = []
        for t_k in values:
            lp_t = replace(lp, temperature=float(t_k))
            rng = np.random.default_rng(
                np.random.SeedSequence([cfg.seed, int(t_k * 1000)]))
            samples = device.thermal_field(lp_t, rng, size=args.samples)
            for i, (hx, hy, hz) in enumerate(samples):
                rows.append([t_k, i, repr(float(hx)), repr(float(hy)),
                             repr(float(hz))])
            summary[f"thermal_std_am_{t_k:g}K"] = device.thermal_std(lp_t)
        _write_csv(out / "thermal_sweep.csv",
                   ["temp_k", "sample", "hx_am", "hy_am", "hz_am"], rows)
    elif args.sweep == "vg":
        values = args.values or [0.03, 0.05, 0.08, 0.1, 0.15]
        rows = []
        for vg in values:
            if vg <= p.v_th:
                rows.append([vg, 0, ""])
                continue
            p_v = replace(p, v_g_nominal=float(vg))
            start = device.MefetState(
                magnetization=device.MagnetizationState(m=(0.0, 0.0, -1.0)))
            _, delay = device.write_mefet(start, p_v, lp, 1)
            rows.append([vg, 1, repr(delay - p.precession_delay)])
        _write_csv(out / "vg_sweep.csv",
                   ["v_g", "switched", "switching_time_s"], rows)
    else:
        bit = args.bit
        start = device.MefetState(magnetization=device.MagnetizationState(
            m=device._settled_pole(1 - bit, lp)))
        record: list = []
        new, delay = device.write_mefet(start, p, lp, bit, record=record)
        rows = [[repr(float(r[0])), repr(float(r[1])), repr(float(r[2])),
                 repr(float(r[3])), repr(float(r[4])), r[5]] for r in record]
        _write_csv(out / "trace.csv",
                   ["t_s", "mx", "my", "mz", "gate_v", "resistance_state"],
                   rows)
        figures.plot_device_trace(record, out / "device_trace.png")
        summary.update({
            "bit": bit,
            "switching_time_s": delay - p.precession_delay,
            "total_delay_s": delay,
            "final_resistance": new.resistance.value,
            "final_resistance_ohm": device.read_resistance(new, p, lp),
        })
    _write_summary(out / "device_summary", summary, args.format)
    return 0


_CELL_OPS = ("hold", "read", "write", "store", "gate", "restore")


def _parse_script(text: str) -> list[tuple[str, int | None]]:
    script = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        op = parts[0].lower()
        if op not in _CELL_OPS:
            raise ConfigError(f"line {lineno}: unknown op {op!r}")
        arg = None
        if op == "write":
            if len(parts) != 2 or parts[1] not in ("0", "1"):
                raise ConfigError(f"line {lineno}: write takes a bit")
            arg = int(parts[1])
        elif len(parts) != 1:
            raise ConfigError(f"line {lineno}: {op} takes no argument")
        script.append((op, arg))
    if not script:
        raise ConfigError("empty scenario script")
    return script


DEFAULT_SCENARIO = "write 0\nread\nstore\ngate\nrestore\nread\n"


def run_cell_script(script, cfg: RunConfig):
    """Execute a straight-line cell scenario; returns (trace, final cell)."""
    state = cell.make_cell(1)
    ledger = EnergyLatencyLedger()
    trace = []
    for cycle, (op, arg) in enumerate(script):
        before = len(ledger.events)
        if op == "hold":
            pass
        elif op == "read":
            cell.read(state, ledger, cfg.costs)
        elif op == "write":
            state = cell.write(state, arg, ledger, cfg.costs)
        elif op == "store":
            state = cell.store(state, cfg.mefet, cfg.llg, ledger, cfg.costs)
        elif op == "gate":
            state = cell.power_gate(state)
        elif op == "restore":
            state = cell.restore(state, cfg.mefet, cfg.llg, ledger, cfg.costs)
        delay = sum(ev.serial_delay for ev in ledger.events[before:])
        energy = sum(ev.energy for ev in ledger.events[before:])
        label = f"{op} {arg}" if arg is not None else op
        trace.append((cycle, label, 0, delay, energy))
    return trace, state, ledger


def cmd_cell(cfg: RunConfig, args, out: Path) -> int:
    if args.script:
        try:
            text = Path(args.script).read_text()
        except OSError as exc:
            raise ConfigError(str(exc)) from exc
    else:
        text = DEFAULT_SCENARIO
    script = _parse_script(text)
    trace, state, ledger = run_cell_script(script, cfg)
    _write_csv(out / "cell_trace.csv",
               ["cycle", "op", "addr", "delay_s", "energy_j"],
               [[c, op, a, repr(d), repr(e)] for c, op, a, d, e in trace])
    figures.plot_cell_trace(trace, out / "cell_trace.png")
    totals = account(ledger, "serial")
    summary = {
        "ops": len(script),
        "final_q": state.q,
        "final_mefet": state.mefet.resistance.value,
        "total_delay_s": totals["latency_s"],
        "total_energy_j": totals["energy_j"],
    }
    _write_summary(out / "cell_summary", summary, args.format)
    return 0


def cmd_compute(cfg: RunConfig, args, out: Path) -> int:
    if args.truth_table:
        cfg_sa = SenseAmpConfig.for_mode(SenseMode.XOR)
        rows = []
        for a in (0, 1):
            for b in (0, 1):
                level = evaluate_rbl(a, b)
                rows.append([a, b, level.value,
                             sense(level, cfg_sa, SenseMode.XOR),
                             sense(level, cfg_sa, SenseMode.XNOR)])
        _write_csv(out / "truth_table.csv",
                   ["qb1", "qb2", "rbl_level", "xor", "xnor"], rows)
        _write_summary(out / "compute_summary", {"mode": "truth-table"},
                       args.format)
        return 0

    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 2]))
    arr = SubArray(rows=args.rows, cols=args.cols)
    arr.q = rng.integers(0, 2, size=(args.rows, args.cols), dtype=np.uint8)
    ledger = EnergyLatencyLedger()
    xnor = arr.bulk_xnor(0, 1, ledger, cfg.costs)
    xor = arr.bulk_xor(0, 1, ledger, cfg.costs)
    expected = np.bitwise_xor(arr.q[0], arr.q[1])
    ok = bool(np.array_equal(xor, expected)
              and np.array_equal(xnor, 1 - expected))
    _write_csv(out / "compute_result.csv",
               ["col", "a", "b", "xor", "xnor"],
               [[i, int(arr.q[0, i]), int(arr.q[1, i]), int(xor[i]),
                 int(xnor[i])] for i in range(args.cols)])
    totals = account(ledger, "parallel")
    summary = {
        "columns": args.cols,
        "verified": ok,
        "bulk_latency_s": totals["latency_s"],
        "energy_j": totals["energy_j"],
    }
    _write_summary(out / "compute_summary", summary, args.format)
    return 0 if ok else 1


def cmd_mc(cfg: RunConfig, args, out: Path) -> int:
    sigmas = list(np.arange(args.sigma_start, args.sigma_stop + 1e-9,
                            args.step))
    ops = [o.strip() for o in args.ops.split(",") if o.strip()]
    for op in ops:
        if op not in variation.WORKLOADS:
            raise ConfigError(f"unknown workload {op!r}")
    overrides = None
    if args.collapse:
        vdd = cfg.montecarlo.vdd
        overrides = {"vref1": 0.0, "vref2": vdd, "vref3": vdd}
    spec = cfg.montecarlo
    rows = []
    curves: dict = {}
    total_failures = 0
    for op in ops:
        curve = []
        for sig in sigmas:
            res = variation.run_campaign(replace(spec, three_sigma_pct=sig),
                                         op, overrides, cfg.mefet)
            curve.append((sig, res.failure_rate))
            total_failures += res.failures
            rows.append([f"{sig:g}", op, res.trials, res.failures,
                         repr(res.failure_rate)])
        curves[op] = tuple(curve)
    _write_csv(out / "mc_results.csv",
               ["sigma_pct", "op", "trials", "failures", "rate"], rows)
    figures.plot_mc_curves(curves, out / "mc_curves.png")
    margins = {name: variation.margin_samples(spec, name)
               for name in ("rsnm", "cwlm")}
    figures.plot_margin_hist(margins, out / "mc_margins.png")
    summary = {
        "iterations": spec.iterations,
        "ops": ",".join(ops),
        "sigma_points": len(sigmas),
        "total_failures": total_failures,
        "collapsed_margins": bool(args.collapse),
    }
    _write_summary(out / "mc_summary", summary, args.format)
    return 0


def cmd_bnn(cfg: RunConfig, args, out: Path) -> int:
    net_path = args.net or cfg.workload_net or _data_path("alexnet5.net")
    layers = bnn.parse_network_file(net_path)
    hier = build_hierarchy(cfg.hierarchy)
    scale = args.scale if args.scale is not None else cfg.workload_scale

    # functional verification at reduced resolution
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 3]))
    reduced = [bnn.scale_layer(layers[0], scale)]
    for layer in layers[1:]:
        prev = reduced[-1]
        reduced.append(replace(bnn.scale_layer(layer, scale),
                               in_channels=prev.out_channels,
                               in_h=prev.out_h, in_w=prev.out_w))
    weights = [rng.integers(0, 2, size=(l.out_channels, l.in_channels,
                                        l.kernel_h, l.kernel_w),
                            dtype=np.uint8) for l in reduced]
    acts = rng.integers(0, 2, size=(reduced[0].in_channels,
                                    reduced[0].in_h, reduced[0].in_w),
                        dtype=np.uint8)
    outputs, _, _ = bnn.run_network(reduced, weights, acts, hier, cfg.costs)
    ref_acts = acts
    verified = True
    for layer, w, got in zip(reduced, weights, outputs):
        ref = bnn.reference_conv(layer, w, ref_acts)
        if not np.array_equal(ref, got):
            verified = False
            break
        ref_acts = bnn.binarize(ref)

    # full-geometry analytic totals
    estimate = bnn.estimate_workload(layers, cfg.costs, hier,
                                     cfg.adder_energy_per_bit)
    baselines = load_baselines(args.baselines)
    ratio_report = bnn.compare_baselines(baselines)
    _write_csv(out / "bnn_layers.csv",
               ["layer", "xnor_count", "xnor_energy_j"],
               [[d["layer"], d["xnor_count"], repr(d["xnor_energy_j"])]
                for d in estimate["layers"]])
    _write_csv(out / "bnn_baselines.csv",
               ["name", "relative_time", "relative_energy"],
               [[r["name"],
                 "" if r["relative_time"] is None else r["relative_time"],
                 "" if r["relative_energy"] is None else r["relative_energy"]]
                for r in ratio_report])
    figures.plot_bnn_energy(estimate["layers"], out / "bnn_energy.png")
    summary = {
        "net": str(net_path),
        "layers": len(layers),
        "reduced_scale": scale,
        "verified_reduced_run": verified,
        "total_xnor": estimate["total_xnor"],
        "total_energy_j": estimate["total_energy_j"],
        "time_s": estimate["time_s"],
    }
    _write_summary(out / "bnn_report", summary, args.format)
    return 0 if verified else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mesram",
        description="Behavioral simulator of a magneto-electric FET "
                    "non-volatile SRAM with in-memory X(N)OR computing.")
    parser.add_argument("--config", metavar="PATH", default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", metavar="DIR", default="out")
    parser.add_argument("--format", choices=("csv", "json"), default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    p_dev = sub.add_parser("device", help="MEFET switching studies")
    p_dev.add_argument("--trace", action="store_true")
    p_dev.add_argument("--sweep", choices=("vg", "temp"), default=None)
    p_dev.add_argument("--values", type=lambda s: [float(x) for x in s.split(",")],
                       default=None)
    p_dev.add_argument("--samples", type=int, default=1000)
    p_dev.add_argument("--bit", type=int, choices=(0, 1), default=1)
    p_dev.set_defaults(func=cmd_device)

    p_cell = sub.add_parser("cell", help="bit-cell scenario traces")
    p_cell.add_argument("--script", metavar="PATH", default=None)
    p_cell.set_defaults(func=cmd_cell)

    p_cmp = sub.add_parser("compute", help="bulk X(N)OR demos")
    p_cmp.add_argument("--truth-table", action="store_true")
    p_cmp.add_argument("--rows", type=int, default=256)
    p_cmp.add_argument("--cols", type=int, default=256)
    p_cmp.set_defaults(func=cmd_compute)

    p_mc = sub.add_parser("mc", help="Monte-Carlo variation campaigns")
    p_mc.add_argument("--sigma-start", type=float, default=0.0)
    p_mc.add_argument("--sigma-stop", type=float, default=70.0)
    p_mc.add_argument("--step", type=float, default=10.0)
    p_mc.add_argument("--ops", default=",".join(variation.WORKLOADS))
    p_mc.add_argument("--collapse", action="store_true",
                      help="force the sense margins onto the rails "
                           "(sanity inversion)")
    p_mc.set_defaults(func=cmd_mc)

    p_bnn = sub.add_parser("bnn", help="binarized-CNN workload report")
    p_bnn.add_argument("--net", metavar="PATH", default=None)
    p_bnn.add_argument("--scale", type=int, default=None)
    p_bnn.add_argument("--baselines", metavar="PATH", default=None)
    p_bnn.set_defaults(func=cmd_bnn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, seed=args.seed)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return args.func(cfg, args, out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MesramError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
