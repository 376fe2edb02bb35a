"""Energy and latency event accounting.

A ledger is an append-only list of (op, count, unit_delay, unit_energy)
events.  Energy is always the exact sum count * unit_energy.  Latency
depends on the declared schedule:

* ``serial``   -- every repetition of every event runs back to back.
* ``parallel`` -- events sharing a ``step`` index run concurrently and
  a single event's ``count`` repetitions are spatially parallel (one
  unit delay per step), so the step latency is the max unit delay.

Bulk bit-line operations exploit the parallel schedule: one event with
count = columns contributes a single unit delay.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True, slots=True)
class LedgerEvent:
    op: str
    count: int
    unit_delay: float
    unit_energy: float
    step: int

    @property
    def energy(self) -> float:
        return self.count * self.unit_energy

    @property
    def serial_delay(self) -> float:
        return self.count * self.unit_delay


@dataclass
class EnergyLatencyLedger:
    events: list[LedgerEvent] = field(default_factory=list)
    _next_step: int = 0

    def add(self, op: str, count: int = 1, unit_delay: float = 0.0,
            unit_energy: float = 0.0, step: int | None = None) -> LedgerEvent:
        if step is None:
            step = self._next_step
        ev = LedgerEvent(op, count, unit_delay, unit_energy, step)
        self.events.append(ev)
        self._next_step = max(self._next_step, step + 1)
        return ev

    def merge(self, other: "EnergyLatencyLedger") -> None:
        """Append another ledger's events (order-insensitive totals)."""
        base = self._next_step
        for ev in other.events:
            self.add(ev.op, ev.count, ev.unit_delay, ev.unit_energy,
                     step=base + ev.step)

    @property
    def total_energy(self) -> float:
        return sum(ev.energy for ev in self.events)

    def op_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for ev in self.events:
            counts[ev.op] = counts.get(ev.op, 0) + ev.count
        return counts

    def op_energy(self) -> dict[str, float]:
        totals: dict[str, float] = {}
        for ev in self.events:
            totals[ev.op] = totals.get(ev.op, 0.0) + ev.energy
        return totals


def account(ledger: EnergyLatencyLedger, schedule: str = "serial") -> dict:
    """Reduce a ledger to totals under the given schedule.

    Energy is schedule-invariant; parallel latency never exceeds serial.
    """
    if schedule not in ("serial", "parallel"):
        raise ValueError(f"unknown schedule {schedule!r}")
    energy = ledger.total_energy
    if schedule == "serial":
        latency = sum(ev.serial_delay for ev in ledger.events)
    else:
        per_step: dict[int, float] = {}
        for ev in ledger.events:
            per_step[ev.step] = max(per_step.get(ev.step, 0.0), ev.unit_delay)
        latency = sum(per_step.values())
    return {
        "schedule": schedule,
        "energy_j": energy,
        "latency_s": latency,
        "ops": ledger.op_counts(),
        "energy_by_op_j": ledger.op_energy(),
    }
