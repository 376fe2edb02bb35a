"""Cache-slice hierarchy and capacity bookkeeping.

Composes sub-arrays into the slice -> bank -> matrix -> sub-array tree
(defaults: a 2.5 MB slice of 80 banks, 32 KB each, two 16 KB matrices
per bank, 8 KB compute sub-arrays of 256 x 256 bits).  Addressing is a
flat byte offset decoded injectively down the tree; the way count is
capacity bookkeeping only.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AddressError, SpecError


@dataclass(frozen=True)
class HierarchySpec:
    slice_capacity: int = 80 * 32 * 1024   # bytes
    banks: int = 80
    bank_capacity: int = 32 * 1024
    ways: int = 20
    matrices_per_bank: int = 2
    matrix_capacity: int = 16 * 1024
    compute_subarray: int = 8 * 1024
    subarray_rows: int = 256
    subarray_cols: int = 256
    # optional per-level overheads, reported separately (default: none)
    interconnect_energy_per_access: float = 0.0
    controller_energy_per_invocation: float = 0.0

    def validate(self) -> None:
        if self.banks * self.bank_capacity != self.slice_capacity:
            raise SpecError("banks * bank_capacity must equal slice_capacity")
        if self.matrices_per_bank * self.matrix_capacity != self.bank_capacity:
            raise SpecError("matrices must tile the bank capacity exactly")
        if self.subarray_rows * self.subarray_cols != self.compute_subarray * 8:
            raise SpecError("sub-array dimensions must match its capacity")
        if self.matrix_capacity % self.compute_subarray != 0:
            raise SpecError("sub-arrays must tile the matrix capacity")


@dataclass(frozen=True)
class Address:
    bank: int
    matrix: int
    subarray: int
    row: int
    col_byte: int


@dataclass(frozen=True)
class Hierarchy:
    spec: HierarchySpec

    @property
    def subarrays_per_matrix(self) -> int:
        return self.spec.matrix_capacity // self.spec.compute_subarray

    @property
    def total_subarrays(self) -> int:
        return (self.spec.banks * self.spec.matrices_per_bank
                * self.subarrays_per_matrix)

    @property
    def row_bytes(self) -> int:
        return self.spec.subarray_cols // 8

    def decode(self, addr: int) -> Address:
        if not (0 <= addr < self.spec.slice_capacity):
            raise AddressError(f"byte address {addr} outside slice")
        bank, rem = divmod(addr, self.spec.bank_capacity)
        matrix, rem = divmod(rem, self.spec.matrix_capacity)
        sub, rem = divmod(rem, self.spec.compute_subarray)
        row, col = divmod(rem, self.row_bytes)
        return Address(bank, matrix, sub, row, col)

    def encode(self, a: Address) -> int:
        if not (0 <= a.bank < self.spec.banks):
            raise AddressError("bank out of range")
        if not (0 <= a.matrix < self.spec.matrices_per_bank):
            raise AddressError("matrix out of range")
        if not (0 <= a.subarray < self.subarrays_per_matrix):
            raise AddressError("sub-array out of range")
        if not (0 <= a.row < self.spec.subarray_rows):
            raise AddressError("row out of range")
        if not (0 <= a.col_byte < self.row_bytes):
            raise AddressError("column byte out of range")
        return (((a.bank * self.spec.matrices_per_bank + a.matrix)
                 * self.subarrays_per_matrix + a.subarray)
                * self.spec.compute_subarray
                + a.row * self.row_bytes + a.col_byte)


def build_hierarchy(spec: HierarchySpec) -> Hierarchy:
    spec.validate()
    return Hierarchy(spec)
