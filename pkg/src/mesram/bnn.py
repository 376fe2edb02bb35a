"""Binarized-CNN execution on the in-memory X(N)OR fabric.

Convolutions over {-1,+1} tensors reduce to XNOR plus popcount:
dot = 2 * popcount(XNOR(w, a)) - N.  Every XNOR bit is produced by a
bulk bit-line operation on a scratch sub-array tile, so the ledger sees
exactly the operations the fabric would execute.  Popcount/addition is
attributed to the digital control unit at a configurable per-bit cost
(default folded into the calibrated per-XNOR energy).

The per-XNOR energy in the default cost table is a calibration
constant: the published workload figure (~0.28 uJ for the five-layer
binarized AlexNet convolution stack) divided by that stack's analytic
XNOR count of 655,566,528.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .cell import OpCost, op_cost
from .errors import (
    ConfigError,
    CostLookupError,
    InvalidInputError,
    MappingError,
    ShapeError,
)
from .hierarchy import Hierarchy
from .ledger import EnergyLatencyLedger, account
from .subarray import SubArray

#: analytic XNOR count of the default five-conv-layer workload
ALEXNET5_XNOR_COUNT = 655_566_528
#: published stack energy the per-XNOR constant is calibrated against
ALEXNET5_ENERGY_J = 0.28e-6


@dataclass(frozen=True)
class BnnLayerSpec:
    in_channels: int
    out_channels: int
    kernel_h: int
    kernel_w: int
    in_h: int
    in_w: int
    stride: int = 1
    padding: int = 0

    def __post_init__(self):
        if min(self.in_channels, self.out_channels, self.kernel_h,
               self.kernel_w, self.in_h, self.in_w, self.stride) < 1:
            raise InvalidInputError("layer dimensions must be positive")
        if self.padding < 0:
            raise InvalidInputError("padding must be non-negative")
        if self.out_h < 1 or self.out_w < 1:
            raise InvalidInputError("output dimensions must be positive")

    @property
    def out_h(self) -> int:
        return (self.in_h + 2 * self.padding - self.kernel_h) // self.stride + 1

    @property
    def out_w(self) -> int:
        return (self.in_w + 2 * self.padding - self.kernel_w) // self.stride + 1

    @property
    def window_bits(self) -> int:
        return self.in_channels * self.kernel_h * self.kernel_w

    @property
    def xnor_count(self) -> int:
        return self.out_channels * self.out_h * self.out_w * self.window_bits


@dataclass(frozen=True)
class CostBaseline:
    name: str
    relative_time: float | None = None
    relative_energy: float | None = None

    def __post_init__(self):
        for v in (self.relative_time, self.relative_energy):
            if v is not None and v <= 0:
                raise InvalidInputError("baseline ratios must be positive")


def binarize(x) -> np.ndarray:
    """Sign binarization to bits: x >= 0 -> 1, x < 0 -> 0 (ties to +1)."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("binarize requires finite values")
    return (x >= 0).astype(np.uint8)


def bits_to_pm1(bits) -> np.ndarray:
    """Decode bits back to the {-1,+1} domain."""
    return 2 * np.asarray(bits, dtype=np.int64) - 1


def _pad(acts: np.ndarray, padding: int) -> np.ndarray:
    if padding == 0:
        return acts
    # padding encodes -1 (bit 0), the conventional binary-net border
    return np.pad(acts, ((0, 0), (padding, padding), (padding, padding)))


def xnor_conv(layer: BnnLayerSpec, weights: np.ndarray, activations: np.ndarray,
              ledger: EnergyLatencyLedger | None = None,
              costs: dict[str, OpCost] | None = None,
              tile_cols: int = 256) -> np.ndarray:
    """XNOR-popcount convolution; returns the integer +/-1 dot products.

    weights: bits of shape (out_channels, in_channels, kh, kw)
    activations: bits of shape (in_channels, in_h, in_w)
    """
    weights = np.asarray(weights, dtype=np.uint8)
    activations = np.asarray(activations, dtype=np.uint8)
    if weights.shape != (layer.out_channels, layer.in_channels,
                         layer.kernel_h, layer.kernel_w):
        raise ShapeError(f"weights shape {weights.shape} mismatches layer")
    if activations.shape != (layer.in_channels, layer.in_h, layer.in_w):
        raise ShapeError(f"activations shape {activations.shape} mismatches layer")

    n = layer.window_bits
    w_flat = weights.reshape(layer.out_channels, n)
    padded = _pad(activations, layer.padding)
    scratch = SubArray(rows=2, cols=tile_cols)
    out = np.empty((layer.out_channels, layer.out_h, layer.out_w),
                   dtype=np.int64)
    for oy in range(layer.out_h):
        for ox in range(layer.out_w):
            y0 = oy * layer.stride
            x0 = ox * layer.stride
            window = padded[:, y0:y0 + layer.kernel_h,
                            x0:x0 + layer.kernel_w].reshape(n)
            for oc in range(layer.out_channels):
                pop = 0
                for start in range(0, n, tile_cols):
                    seg = slice(start, min(start + tile_cols, n))
                    width = seg.stop - seg.start
                    row_a = np.zeros(tile_cols, dtype=np.uint8)
                    row_b = np.zeros(tile_cols, dtype=np.uint8)
                    row_a[:width] = window[seg]
                    row_b[:width] = w_flat[oc, seg]
                    scratch.write_row(0, row_a, ledger, costs)
                    scratch.write_row(1, row_b, ledger, costs)
                    xnor = scratch.bulk_xnor(0, 1, ledger, costs)
                    pop += int(xnor[:width].sum())
                out[oc, oy, ox] = 2 * pop - n
    return out


def reference_conv(layer: BnnLayerSpec, weights: np.ndarray,
                   activations: np.ndarray) -> np.ndarray:
    """Dense +/-1 convolution in plain integer arithmetic (oracle path)."""
    w = bits_to_pm1(weights)
    a = bits_to_pm1(_pad(np.asarray(activations, dtype=np.uint8),
                         layer.padding))
    out = np.empty((layer.out_channels, layer.out_h, layer.out_w),
                   dtype=np.int64)
    for oy in range(layer.out_h):
        for ox in range(layer.out_w):
            y0 = oy * layer.stride
            x0 = ox * layer.stride
            win = a[:, y0:y0 + layer.kernel_h, x0:x0 + layer.kernel_w]
            out[:, oy, ox] = np.tensordot(w, win, axes=([1, 2, 3], [0, 1, 2]))
    return out


def required_bits(layer: BnnLayerSpec) -> int:
    weight_bits = layer.out_channels * layer.window_bits
    act_bits = layer.in_channels * layer.in_h * layer.in_w
    return weight_bits + act_bits


def run_network(layers, weights_list, input_bits,
                hierarchy: Hierarchy | None = None,
                costs: dict[str, OpCost] | None = None,
                allow_tiling: bool = True,
                tile_cols: int = 256):
    """Execute the layer stack; returns (outputs, time_s, energy_j).

    Layer outputs are sign-binarized before feeding the next layer.
    Latency is accounted under the parallel-across-subarrays schedule.
    """
    if len(layers) != len(weights_list):
        raise ShapeError("one weight tensor per layer required")
    if hierarchy is not None:
        cap_bits = hierarchy.spec.slice_capacity * 8
        for layer in layers:
            if required_bits(layer) > cap_bits and not allow_tiling:
                raise MappingError(
                    f"layer needs {required_bits(layer)} bits, slice has "
                    f"{cap_bits}; enable tiling")
    ledger = EnergyLatencyLedger()
    acts = np.asarray(input_bits, dtype=np.uint8)
    outputs = []
    for layer, weights in zip(layers, weights_list):
        out = xnor_conv(layer, weights, acts, ledger, costs, tile_cols)
        outputs.append(out)
        acts = binarize(out)
    totals = account(ledger, "parallel")
    return outputs, totals["latency_s"], totals["energy_j"]


def estimate_workload(layers, costs: dict[str, OpCost] | None = None,
                      hierarchy: Hierarchy | None = None,
                      adder_energy_per_bit: float = 0.0) -> dict:
    """Analytic energy/time totals from per-layer XNOR counts.

    Used to scale a reduced-resolution functional run up to the full
    workload geometry without executing every bit.
    """
    c = op_cost("xnor", costs)
    lanes = (hierarchy.total_subarrays * hierarchy.spec.subarray_cols
             if hierarchy is not None else 1)
    per_layer = []
    total_xnor = 0
    for i, layer in enumerate(layers):
        n = layer.xnor_count
        total_xnor += n
        per_layer.append({
            "layer": i,
            "xnor_count": n,
            "xnor_energy_j": n * c.pdp,
            "adder_energy_j": n * adder_energy_per_bit,
        })
    cycles = -(-total_xnor // lanes)
    return {
        "layers": per_layer,
        "total_xnor": total_xnor,
        "xnor_energy_j": total_xnor * c.pdp,
        "adder_energy_j": total_xnor * adder_energy_per_bit,
        "total_energy_j": total_xnor * (c.pdp + adder_energy_per_bit),
        "time_s": cycles * c.delay,
    }


def compare_baselines(baselines, query: str | None = None) -> list[dict]:
    """Echo the fixture ratios relative to this design (self = 1x).

    The published ratios are inputs, not quantities re-derived here.
    """
    table = {b.name: b for b in baselines}
    if query is not None and query != "me-sram" and query not in table:
        raise CostLookupError(query)
    report = [{"name": "me-sram", "relative_time": 1.0,
               "relative_energy": 1.0}]
    for b in baselines:
        report.append({"name": b.name, "relative_time": b.relative_time,
                       "relative_energy": b.relative_energy})
    if query is not None:
        report = [r for r in report if r["name"] in (query,)]
    return report


def scale_layer(layer: BnnLayerSpec, spatial_divisor: int) -> BnnLayerSpec:
    """Shrink a layer's spatial extent for reduced-resolution runs."""
    in_h = max(layer.kernel_h, layer.in_h // spatial_divisor)
    in_w = max(layer.kernel_w, layer.in_w // spatial_divisor)
    return BnnLayerSpec(layer.in_channels, layer.out_channels,
                        layer.kernel_h, layer.kernel_w, in_h, in_w,
                        layer.stride, layer.padding)


def parse_network_file(path) -> list[BnnLayerSpec]:
    """Text network format: one layer per line,

        conv <in_ch> <out_ch> <kernel> <stride> <padding> <in_h> <in_w>

    '#' starts a comment.
    """
    layers = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] != "conv" or len(parts) != 8:
                raise ConfigError(f"{path}:{lineno}: expected "
                                  "'conv in_ch out_ch k stride pad in_h in_w'")
            in_ch, out_ch, k, stride, pad, in_h, in_w = map(int, parts[1:])
            layers.append(BnnLayerSpec(in_ch, out_ch, k, k, in_h, in_w,
                                       stride, pad))
    if not layers:
        raise ConfigError(f"{path}: no layers defined")
    return layers


_TENSOR_MAGIC = b"MESRAMT1"


def save_tensor_bits(bits: np.ndarray, path) -> None:
    """Bit-packed tensor file: 16-byte header (magic, u32 ndim,
    u32 total bit count), little-endian u32 dims, packed payload."""
    bits = np.asarray(bits, dtype=np.uint8)
    with open(path, "wb") as fh:
        fh.write(_TENSOR_MAGIC)
        fh.write(struct.pack("<II", bits.ndim, bits.size))
        fh.write(struct.pack(f"<{bits.ndim}I", *bits.shape))
        fh.write(np.packbits(bits, axis=None).tobytes())


def load_tensor_bits(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(len(_TENSOR_MAGIC))
        if magic != _TENSOR_MAGIC:
            raise ConfigError(f"bad tensor magic {magic!r}")
        ndim, size = struct.unpack("<II", fh.read(8))
        shape = struct.unpack(f"<{ndim}I", fh.read(4 * ndim))
        payload = np.frombuffer(fh.read(), dtype=np.uint8)
    return np.unpackbits(payload)[:size].reshape(shape)
