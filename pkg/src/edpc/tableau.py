"""Stabilizer tableau with symbolic signs.

Rows are Python-int bitsets. Every sign is an affine GF(2) form over
measurement outcome variables, stored as an int: bit 0 is the constant term
and bit ``k + 1`` is variable ``k``. Running a Clifford circuit once therefore
describes its behavior for every possible sequence of outcomes.
"""

from __future__ import annotations

import random as _random
from typing import Sequence

CONST = 1


def var_form(k: int) -> int:
    return 1 << (k + 1)


def evaluate(form: int, assignment: int) -> int:
    """Value of ``form`` when variable ``k`` takes bit ``k + 1`` of ``assignment``."""
    return (form & (assignment | CONST)).bit_count() & 1


def random_assignment(n_vars: int, rng: _random.Random) -> int:
    return rng.getrandbits(n_vars) << 1 if n_vars else 0


def _product_phase(x1: int, z1: int, x2: int, z2: int) -> int:
    """Exponent of i in P1 * P2 relative to the bare product string, mod 4."""
    nx1, nz1, nx2, nz2 = ~x1, ~z1, ~x2, ~z2
    plus = (x1 & nz1 & x2 & z2) | (nx1 & z1 & x2 & nz2) | (x1 & z1 & nx2 & z2)
    minus = (x1 & nz1 & nx2 & z2) | (nx1 & z1 & x2 & z2) | (x1 & z1 & x2 & nz2)
    return (plus.bit_count() - minus.bit_count()) % 4


def anticommutes(x1: int, z1: int, x2: int, z2: int) -> bool:
    return ((x1 & z2) ^ (z1 & x2)).bit_count() & 1 == 1


class Tableau:
    """``n`` qubits starting in ``|0...0>``; rows ``0..n-1`` destabilizers,
    ``n..2n-1`` stabilizers."""

    def __init__(self, n: int, first_var: int = 0):
        self.n = n
        self.x = [1 << i for i in range(n)] + [0] * n
        self.z = [0] * n + [1 << i for i in range(n)]
        self.s = [0] * (2 * n)
        self.next_var = first_var

    def fresh(self) -> int:
        k = self.next_var
        self.next_var += 1
        return var_form(k)

    # gates -----------------------------------------------------------------
    def h(self, q: int) -> None:
        b = 1 << q
        x, z, s = self.x, self.z, self.s
        for r in range(2 * self.n):
            xb, zb = x[r] & b, z[r] & b
            if xb and zb:
                s[r] ^= CONST
            if bool(xb) != bool(zb):
                x[r] ^= b
                z[r] ^= b

    def s_gate(self, q: int) -> None:
        b = 1 << q
        x, z, s = self.x, self.z, self.s
        for r in range(2 * self.n):
            if x[r] & b:
                if z[r] & b:
                    s[r] ^= CONST
                z[r] ^= b

    def sdg(self, q: int) -> None:
        b = 1 << q
        x, z, s = self.x, self.z, self.s
        for r in range(2 * self.n):
            if x[r] & b:
                if not z[r] & b:
                    s[r] ^= CONST
                z[r] ^= b

    def sx(self, q: int) -> None:
        self.h(q)
        self.s_gate(q)
        self.h(q)

    def sxdg(self, q: int) -> None:
        self.h(q)
        self.sdg(q)
        self.h(q)

    def cnot(self, c: int, t: int) -> None:
        bc, bt = 1 << c, 1 << t
        x, z, s = self.x, self.z, self.s
        for r in range(2 * self.n):
            xc, zt = x[r] & bc, z[r] & bt
            if xc and zt and bool(x[r] & bt) == bool(z[r] & bc):
                s[r] ^= CONST
            if xc:
                x[r] ^= bt
            if zt:
                z[r] ^= bc

    def pauli(self, px: int, pz: int, form: int = CONST) -> None:
        """Apply ``X[px] Z[pz]`` conditioned on ``form``."""
        if not form:
            return
        x, z, s = self.x, self.z, self.s
        for r in range(self.n, 2 * self.n):
            if anticommutes(x[r], z[r], px, pz):
                s[r] ^= form

    # measurement -------------------------------------------------------------
    def _rowmult(self, h: int, i: int) -> None:
        """Row h <- row h * row i."""
        x, z, s = self.x, self.z, self.s
        if _product_phase(x[h], z[h], x[i], z[i]) == 2:
            s[h] ^= CONST
        s[h] ^= s[i]
        x[h] ^= x[i]
        z[h] ^= z[i]

    def measure(self, px: int, pz: int, forced: int | None = None) -> tuple[int, bool]:
        """Measure Pauli ``X[px] Z[pz]`` (Hermitian, Y where both bits set).

        Returns (outcome form, was_random). A random outcome gets a fresh
        variable unless ``forced`` supplies its form.
        """
        n = self.n
        x, z, s = self.x, self.z, self.s
        p = next((r for r in range(n, 2 * n) if anticommutes(x[r], z[r], px, pz)), None)
        if p is not None:
            for r in range(2 * n):
                if r != p and anticommutes(x[r], z[r], px, pz):
                    self._rowmult(r, p)
            d = p - n
            x[d], z[d], s[d] = x[p], z[p], s[p]
            form = self.fresh() if forced is None else forced
            x[p], z[p], s[p] = px, pz, form
            return form, True
        acc_x = acc_z = 0
        acc_s = 0
        phase = 0
        for i in range(n):
            if anticommutes(x[i], z[i], px, pz):
                r = i + n
                phase = (phase + _product_phase(acc_x, acc_z, x[r], z[r])) % 4
                acc_s ^= s[r]
                acc_x ^= x[r]
                acc_z ^= z[r]
        if (acc_x, acc_z) != (px, pz):
            raise AssertionError("deterministic measurement did not reconstruct the observable")
        if phase == 2:
            acc_s ^= CONST
        return acc_s, False

    def measure_z(self, q: int, forced: int | None = None) -> tuple[int, bool]:
        return self.measure(0, 1 << q, forced)

    def measure_x(self, q: int, forced: int | None = None) -> tuple[int, bool]:
        return self.measure(1 << q, 0, forced)

    def reset(self, q: int) -> None:
        form, _ = self.measure_z(q)
        self.pauli(1 << q, 0, form)

    def reset_x(self, q: int) -> None:
        self.reset(q)
        self.h(q)

    # inspection --------------------------------------------------------------
    def stabilizers(self) -> list[tuple[int, int, int]]:
        return [(self.x[r], self.z[r], self.s[r]) for r in range(self.n, 2 * self.n)]

    def check(self) -> None:
        """Rows commute as required and the stabilizers are independent."""
        n = self.n
        for a in range(2 * n):
            for b in range(a + 1, 2 * n):
                expect = b == a + n
                if anticommutes(self.x[a], self.z[a], self.x[b], self.z[b]) != expect:
                    raise AssertionError(f"rows {a} and {b} violate the tableau commutation pattern")


def canonical_group(rows: Sequence[tuple[int, int, int]], order: Sequence[int]) -> list[tuple[int, int, int]]:
    """Reduced row echelon form of a stabilizer group on qubits ``order``.

    Returned rows are re-indexed so position k in ``order`` becomes bit k.
    Rows with support outside ``order`` are expected to have been removed.
    """
    remapped = []
    for x, z, s in rows:
        nx = nz = 0
        for k, q in enumerate(order):
            if x >> q & 1:
                nx |= 1 << k
            if z >> q & 1:
                nz |= 1 << k
        remapped.append([nx, nz, s])
    return _rref(remapped, len(order))


def _mult(a: list[int], b: list[int]) -> None:
    if _product_phase(a[0], a[1], b[0], b[1]) == 2:
        a[2] ^= CONST
    a[2] ^= b[2]
    a[0] ^= b[0]
    a[1] ^= b[1]


def _rref(rows: list[list[int]], m: int) -> list[tuple[int, int, int]]:
    rows = [r for r in rows]
    out_rank = 0
    for q in range(m):
        for part in (0, 1):
            bit = 1 << q
            piv = next((i for i in range(out_rank, len(rows)) if rows[i][part] & bit), None)
            if piv is None:
                continue
            rows[out_rank], rows[piv] = rows[piv], rows[out_rank]
            for i in range(len(rows)):
                if i != out_rank and rows[i][part] & bit:
                    _mult(rows[i], rows[out_rank])
            out_rank += 1
    return [tuple(r) for r in rows[:out_rank]]


def restrict_group(rows: Sequence[tuple[int, int, int]], drop: Sequence[int], keep: Sequence[int]) -> list[tuple[int, int, int]]:
    """Generators of the subgroup supported only on ``keep``, re-indexed in
    ``keep`` order and brought to canonical form."""
    order = list(drop) + list(keep)
    reduced = canonical_group(rows, order)
    nd = len(drop)
    mask = (1 << nd) - 1
    kept = []
    for x, z, s in reduced:
        if x & mask or z & mask:
            continue
        kept.append([x >> nd, z >> nd, s])
    return _rref(kept, len(keep))
