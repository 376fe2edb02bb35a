"""Sub-array model with single-cycle bulk bit-line X(N)OR.

Two rows of one column are activated with opposite word-line rails
while the read bit-line is precharged to half the supply.  The two read
ports then form a voltage divider: equal operands leave the line at the
midpoint, unequal operands tie it to a rail.  A two-comparator sense
amplifier classifies midpoint vs. rail and an OR gate emits the XOR
(or its complement for XNOR).

The stored image is kept as a dense uint8 bit matrix; compute reads the
ports only and never disturbs cell contents.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .cell import DEFAULT_COSTS, OpCost, op_cost
from .errors import (
    AddressError,
    ConfigError,
    InvalidInputError,
    MultiRowActivationError,
)
from .ledger import EnergyLatencyLedger


class RblLevel(Enum):
    GND = "GND"
    MID = "MID"
    VDD = "VDD"


class SenseMode(Enum):
    XOR = "XOR"
    XNOR = "XNOR"
    MEMORY = "MEMORY"


# control-bit encoding is implementation-defined: (En2, En1, S1, S0)
_MODE_BITS = {
    SenseMode.MEMORY: (0, 1, 0, 0),
    SenseMode.XOR: (1, 1, 0, 1),
    SenseMode.XNOR: (1, 1, 1, 1),
}


@dataclass(frozen=True)
class SenseAmpConfig:
    en2: int = 1
    en1: int = 1
    s1: int = 0
    s0: int = 1
    vref1: float = 0.2
    vref2: float = 0.6
    vref3: float = 0.4

    @classmethod
    def for_mode(cls, mode: SenseMode, vdd: float = 0.8) -> "SenseAmpConfig":
        en2, en1, s1, s0 = _MODE_BITS[mode]
        return cls(en2, en1, s1, s0,
                   vref1=0.25 * vdd, vref2=0.75 * vdd, vref3=0.5 * vdd)

    def validate_compute(self) -> None:
        if not (self.vref1 < self.vref3 < self.vref2):
            raise ConfigError("compute mode requires vref1 < vref3 < vref2")


def evaluate_rbl(a_qb: int, b_qb: int) -> RblLevel:
    """Classify the bit-line level for one activated operand pair.

    The row whose word line sits at VDD pulls toward VDD when its read
    port conducts (QB=1); the grounded row pulls toward ground.  Equal
    operands leave the line at the precharged midpoint (both conducting:
    the divider re-centers; neither conducting: the line floats).
    """
    for v in (a_qb, b_qb):
        if v not in (0, 1):
            raise InvalidInputError("operand bits must be 0 or 1")
    if a_qb == b_qb:
        return RblLevel.MID
    return RblLevel.VDD if a_qb == 1 else RblLevel.GND


def sense(rbl: RblLevel, cfg: SenseAmpConfig, mode: SenseMode) -> int:
    """Decode a classified bit-line level through the sense amplifier."""
    if mode in (SenseMode.XOR, SenseMode.XNOR):
        cfg.validate_compute()
        differ = 0 if rbl is RblLevel.MID else 1
        return differ if mode is SenseMode.XOR else 1 - differ
    # memory read: single comparator against the midpoint reference;
    # an undischarged line reads as stored 1
    return 1 if rbl is RblLevel.VDD else 0


@dataclass
class SubArray:
    rows: int = 256
    cols: int = 256
    vdd: float = 0.8
    q: np.ndarray = field(default=None)  # uint8 bit matrix, Q per cell

    def __post_init__(self):
        if self.rows < 2:
            raise InvalidInputError("compute mode needs at least 2 rows")
        if self.q is None:
            self.q = np.zeros((self.rows, self.cols), dtype=np.uint8)
        else:
            self.q = np.asarray(self.q, dtype=np.uint8)
            if self.q.shape != (self.rows, self.cols):
                raise InvalidInputError("q shape mismatch")

    @property
    def qb(self) -> np.ndarray:
        return (1 - self.q).astype(np.uint8)

    def _check_row(self, row: int) -> None:
        if not (0 <= row < self.rows):
            raise AddressError(f"row {row} out of range 0..{self.rows - 1}")

    def write_row(self, row: int, bits, ledger: EnergyLatencyLedger | None = None,
                  costs: dict[str, OpCost] | None = None) -> None:
        self._check_row(row)
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.shape != (self.cols,):
            raise InvalidInputError("row width mismatch")
        self.q[row] = bits
        if ledger is not None:
            c = op_cost("write", costs)
            ledger.add("write", self.cols, c.delay, c.pdp)

    def read_row(self, row: int, ledger: EnergyLatencyLedger | None = None,
                 costs: dict[str, OpCost] | None = None) -> np.ndarray:
        self._check_row(row)
        if ledger is not None:
            c = op_cost("read", costs)
            ledger.add("read", self.cols, c.delay, c.pdp)
        return self.q[row].copy()

    def copy_row(self, src: int, dst: int,
                 ledger: EnergyLatencyLedger | None = None,
                 costs: dict[str, OpCost] | None = None) -> None:
        """Operand alignment helper; charged at read + write cost."""
        bits = self.read_row(src, ledger, costs)
        self.write_row(dst, bits, ledger, costs)

    def _bulk(self, row_a: int, row_b: int, mode: SenseMode,
              activated: tuple[int, ...] | None,
              ledger: EnergyLatencyLedger | None,
              costs: dict[str, OpCost] | None) -> np.ndarray:
        if activated is not None and len(activated) > 2:
            raise MultiRowActivationError(
                f"{len(activated)} rows activated; bit-line compute takes 2")
        self._check_row(row_a)
        self._check_row(row_b)
        if row_a == row_b:
            raise AddressError("operand rows must differ")
        cfg = SenseAmpConfig.for_mode(mode, self.vdd)
        cfg.validate_compute()
        qb = self.qb
        qa, qb2 = qb[row_a], qb[row_b]
        # vectorized divider classification: -1 GND rail, 0 midpoint, +1 VDD rail
        level = np.zeros(self.cols, dtype=np.int8)
        level[(qa == 1) & (qb2 == 0)] = 1
        level[(qa == 0) & (qb2 == 1)] = -1
        differ = (level != 0).astype(np.uint8)
        out = differ if mode is SenseMode.XOR else (1 - differ).astype(np.uint8)
        if ledger is not None:
            c = op_cost("xnor", costs)
            ledger.add("xnor", self.cols, c.delay, c.pdp)
        return out

    def bulk_xnor(self, row_a: int, row_b: int,
                  ledger: EnergyLatencyLedger | None = None,
                  costs: dict[str, OpCost] | None = None,
                  activated: tuple[int, ...] | None = None) -> np.ndarray:
        """Single-cycle per-column XNOR of two stored words."""
        return self._bulk(row_a, row_b, SenseMode.XNOR, activated, ledger, costs)

    def bulk_xor(self, row_a: int, row_b: int,
                 ledger: EnergyLatencyLedger | None = None,
                 costs: dict[str, OpCost] | None = None,
                 activated: tuple[int, ...] | None = None) -> np.ndarray:
        """Single-cycle per-column XOR of two stored words."""
        return self._bulk(row_a, row_b, SenseMode.XOR, activated, ledger, costs)


_MAGIC = b"MESRAM1"


def save_image(arr: SubArray, path) -> None:
    """Binary image dump: magic, u32 rows, u32 cols, packed row-major bits."""
    packed = np.packbits(arr.q, axis=None)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", arr.rows, arr.cols))
        fh.write(packed.tobytes())


def load_image(path, vdd: float = 0.8) -> SubArray:
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise ConfigError(f"bad image magic {magic!r}")
        rows, cols = struct.unpack("<II", fh.read(8))
        data = np.frombuffer(fh.read(), dtype=np.uint8)
    bits = np.unpackbits(data)[: rows * cols].reshape(rows, cols)
    return SubArray(rows=rows, cols=cols, vdd=vdd, q=bits)


def dump_hex(arr: SubArray) -> str:
    """Hex-dump text form (one packed row per line) for fixtures."""
    lines = [f"{_MAGIC.decode()} {arr.rows} {arr.cols}"]
    for r in range(arr.rows):
        lines.append(np.packbits(arr.q[r]).tobytes().hex())
    return "\n".join(lines) + "\n"


def parse_hex(text: str, vdd: float = 0.8) -> SubArray:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != _MAGIC.decode():
        raise ConfigError("bad hex-dump header")
    rows, cols = int(head[1]), int(head[2])
    if len(lines) - 1 != rows:
        raise ConfigError("hex-dump row count mismatch")
    q = np.zeros((rows, cols), dtype=np.uint8)
    for r, ln in enumerate(lines[1:]):
        data = np.frombuffer(bytes.fromhex(ln.strip()), dtype=np.uint8)
        q[r] = np.unpackbits(data)[:cols]
    return SubArray(rows=rows, cols=cols, vdd=vdd, q=q)
