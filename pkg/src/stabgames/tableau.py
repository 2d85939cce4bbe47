"""Stabilizer groups over qubits and qudits: canonical form, membership with
phase, expectation values, ground-space dimension, sector fixing.

Rows are genuine group elements, so every "row operation" is an operator
product and phases are exact by construction.  For d=2 the canonical form is
the reduced row echelon form over GF(2) (bit-packed ints); for general d it
is the Howell normal form over Z_d, which is what membership testing needs
when d has zero divisors (d=4 here).

Expectation values of an operator O in the stabilized space come in three
kinds: Definite (a root of unity, when O is a phase times a group element),
Zero (O fails to commute with some stabilizer), and Logical (O commutes with
everything but is not in the group modulo phase).  Logical is deliberately
explicit; degenerate resource states make the distinction load-bearing.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .pauli import PauliOperator
from .weyl import WeylOperator, commutation_phase, w_multiply, w_power

AnyOperator = Union[PauliOperator, WeylOperator]


@dataclass(frozen=True)
class Expectation:
    """Result of an <O> query against a stabilizer group."""

    kind: str  # "definite" | "zero" | "logical"
    d: int
    phase_exp: int = 0  # exponent of exp(i*pi/d), only meaningful for definite

    @property
    def value(self) -> complex:
        if self.kind == "definite":
            return cmath.exp(1j * cmath.pi * self.phase_exp / self.d)
        return 0j

    def is_definite(self, phase_exp: Optional[int] = None) -> bool:
        if self.kind != "definite":
            return False
        return phase_exp is None or (self.phase_exp - phase_exp) % (2 * self.d) == 0


def _as_weyl(op: AnyOperator) -> WeylOperator:
    return WeylOperator.from_pauli(op) if isinstance(op, PauliOperator) else op


class _QubitRows:
    """Row arithmetic on bit-packed Pauli rows; columns are x_0..x_{n-1}, z_0..z_{n-1}."""

    def __init__(self, n: int):
        self.n = n

    def col(self, row: PauliOperator, c: int) -> int:
        if c < self.n:
            return (row.x >> c) & 1
        return (row.z >> (c - self.n)) & 1

    @staticmethod
    def mul(a: PauliOperator, b: PauliOperator) -> PauliOperator:
        return a * b

    @staticmethod
    def pow(a: PauliOperator, k: int) -> PauliOperator:
        k %= 2
        return a if k else PauliOperator.identity(a.n)

    @staticmethod
    def true_pow(a: PauliOperator, k: int) -> PauliOperator:
        acc = PauliOperator.identity(a.n)
        for _ in range(k):
            acc = acc * a
        return acc

    @staticmethod
    def comm(a: PauliOperator, b: PauliOperator) -> int:
        pc = bin(a.x & b.z).count("1") + bin(a.z & b.x).count("1")
        return pc % 2

    @staticmethod
    def is_scalar(a: PauliOperator) -> bool:
        return a.x == 0 and a.z == 0

    @staticmethod
    def phase_of(a: PauliOperator) -> int:
        return a.phase

    @staticmethod
    def identity(d: int, n: int) -> PauliOperator:
        return PauliOperator.identity(n)


class _QuditRows:
    """Row arithmetic on WeylOperator rows over Z_d."""

    def __init__(self, d: int, n: int):
        self.d = d
        self.n = n

    def col(self, row: WeylOperator, c: int) -> int:
        return row.x[c] if c < self.n else row.z[c - self.n]

    @staticmethod
    def mul(a: WeylOperator, b: WeylOperator) -> WeylOperator:
        return w_multiply(a, b)

    @staticmethod
    def pow(a: WeylOperator, k: int) -> WeylOperator:
        return w_power(a, k)

    @staticmethod
    def true_pow(a: WeylOperator, k: int) -> WeylOperator:
        return w_power(a, k)

    @staticmethod
    def comm(a: WeylOperator, b: WeylOperator) -> int:
        return commutation_phase(a, b)

    @staticmethod
    def is_scalar(a: WeylOperator) -> bool:
        return a.is_scalar()

    @staticmethod
    def phase_of(a: WeylOperator) -> int:
        return a.phase

    @staticmethod
    def identity(d: int, n: int) -> WeylOperator:
        return WeylOperator.identity(d, n)


def _unit_inverse(u: int, d: int) -> Optional[int]:
    """Multiplicative inverse of u in Z_d, or None if u is not a unit."""
    if math.gcd(u, d) != 1:
        return None
    return pow(u, -1, d)


class StabilizerGroup:
    """Abelian group of (generalized) Pauli operators not containing a
    nontrivial scalar; canonicalized on construction."""

    def __init__(
        self,
        generators: Sequence[AnyOperator],
        d: Optional[int] = None,
        n: Optional[int] = None,
    ):
        gens = list(generators)
        if gens:
            first = gens[0]
            self.d = 2 if isinstance(first, PauliOperator) else first.d
            self.n = first.n
        else:
            if d is None or n is None:
                raise ValueError("empty group needs explicit d and n")
            self.d, self.n = d, n
        if d is not None and d != self.d:
            raise ValueError("dimension mismatch with generators")
        if n is not None and n != self.n:
            raise ValueError("register mismatch with generators")
        qubit = self.d == 2 and all(isinstance(g, PauliOperator) for g in gens)
        self._ops = _QubitRows(self.n) if qubit else _QuditRows(self.d, self.n)
        if not qubit:
            gens = [_as_weyl(g) for g in gens]
        for g in gens:
            if g.n != self.n:
                raise ValueError("generator register size mismatch")
            if isinstance(g, WeylOperator) and g.d != self.d:
                raise ValueError("generator dimension mismatch")
        for i, g in enumerate(gens):
            for h in gens[i + 1 :]:
                if self._ops.comm(g, h) != 0:
                    raise ValueError("generators do not commute")
        self.generators = tuple(gens)
        self.rows: List[AnyOperator] = []
        self.pivots: List[Tuple[int, int]] = []  # (column, pivot value)
        self._canonicalize(list(gens))

    # -- canonical form ------------------------------------------------

    def _canonicalize(self, work: List[AnyOperator]) -> None:
        ops, d = self._ops, self.d
        rows: List[AnyOperator] = []
        pivots: List[Tuple[int, int]] = []
        pending = list(work)
        for col in range(2 * self.n):
            # pick the pending row with the "most invertible" entry at col
            best = None
            best_gcd = d
            for idx, r in enumerate(pending):
                e = ops.col(r, col)
                if e == 0:
                    continue
                g = math.gcd(e, d)
                if g < best_gcd:
                    best, best_gcd = idx, g
                    if g == 1:
                        break
            if best is None:
                continue
            piv = pending.pop(best)
            e = ops.col(piv, col)
            inv = _unit_inverse(e, d)
            if inv is not None:
                piv = ops.pow(piv, inv)
                pval = 1
                closure = ops.true_pow(piv, d)
                if ops.phase_of(closure) != 0:
                    raise ValueError("inconsistent group: nontrivial scalar generated")
            else:
                # zero-divisor pivot: normalize to the gcd and keep span closure
                pval = best_gcd
                scale = _unit_inverse(e // pval, d // pval)
                if scale is not None and scale != 1:
                    piv = ops.pow(piv, scale)
                extra = ops.true_pow(piv, d // pval)
                if not ops.is_scalar(extra):
                    pending.append(extra)
                elif ops.phase_of(extra) != 0:
                    raise ValueError("inconsistent group: nontrivial scalar generated")
            # eliminate this column from pending rows and from earlier rows
            for i, r in enumerate(pending):
                k = ops.col(r, col)
                if k % pval == 0:
                    q = k // pval
                else:
                    # not clearable exactly; clear as far as possible (Howell)
                    q = k // pval
                if q:
                    pending[i] = ops.mul(r, ops.pow(piv, -q))
            for i, r in enumerate(rows):
                k = ops.col(r, col)
                q = k // pval
                if q:
                    rows[i] = ops.mul(r, ops.pow(piv, -q))
            rows.append(piv)
            pivots.append((col, pval))
        for r in pending:
            if not ops.is_scalar(r):
                raise ValueError("canonicalization failed to clear a row")
            if ops.phase_of(r) != 0:
                raise ValueError("inconsistent group: nontrivial scalar generated")
        self.rows = rows
        self.pivots = pivots

    # -- queries ---------------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.rows)

    def group_order(self) -> int:
        order = 1
        for _, v in self.pivots:
            order *= self.d // v
        return order

    def ground_space_dim(self) -> int:
        total = self.d**self.n
        order = self.group_order()
        if total % order:
            raise ValueError("group order does not divide Hilbert dimension")
        return total // order

    def ground_space_log_dim(self) -> int:
        dim = self.ground_space_dim()
        if dim & (dim - 1):
            raise ValueError("stabilized-space dimension is not a power of two")
        return dim.bit_length() - 1

    def _coerce(self, op: AnyOperator) -> AnyOperator:
        if isinstance(self._ops, _QubitRows):
            if isinstance(op, WeylOperator):
                return op.to_pauli()
            return op
        return _as_weyl(op)

    def reduce(self, op: AnyOperator) -> AnyOperator:
        """Multiply op by group elements to clear every pivot column."""
        ops = self._ops
        cur = self._coerce(op)
        for (col, pval), row in zip(self.pivots, self.rows):
            e = ops.col(cur, col)
            if e % pval == 0:
                q = e // pval
                if q:
                    cur = ops.mul(cur, ops.pow(row, -q))
        return cur

    def expectation(self, op: AnyOperator) -> Expectation:
        cur = self._coerce(op)
        if cur.n != self.n:
            raise ValueError("register mismatch")
        ops = self._ops
        for row in self.rows:
            if ops.comm(row, cur) != 0:
                return Expectation("zero", self.d)
        cur = self.reduce(cur)
        if ops.is_scalar(cur):
            phase = ops.phase_of(cur)
            if self.d == 2 and isinstance(cur, PauliOperator):
                # PauliOperator phases are i-exponents = exp(i*pi/2) exponents
                return Expectation("definite", 2, phase)
            return Expectation("definite", self.d, phase)
        return Expectation("logical", self.d)

    def contains(self, op: AnyOperator, phase_exp: int = 0) -> bool:
        e = self.expectation(op)
        return e.is_definite(phase_exp)

    def fix_sector(self, logicals: Iterable[AnyOperator]) -> "StabilizerGroup":
        """Enlarge the group by commuting operators, pinning their eigenvalues.

        Each operator is adjoined exactly as given (with its phase), so to fix
        a sector to an eigenvalue other than +1 the caller scales it first.
        """
        new_gens = list(self.generators)
        for lg in logicals:
            lg = self._coerce(lg)
            e = self.expectation(lg)
            if e.kind == "zero":
                raise ValueError("proposed sector fixer anticommutes with the group")
            if e.kind == "definite" and e.phase_exp % (2 * self.d) != 0:
                raise ValueError("sector fixer already in group with a different phase")
            new_gens.append(lg)
        return StabilizerGroup(new_gens, d=self.d, n=self.n)

    # -- text io -----------------------------------------------------------

    def export_text(self) -> str:
        return "\n".join(g.to_text() for g in self.generators)

    @staticmethod
    def import_text(text: str, d: int, n: int) -> "StabilizerGroup":
        gens: List[AnyOperator] = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if d == 2 and "w^" not in line:
                gens.append(PauliOperator.from_text(line, n))
            else:
                gens.append(WeylOperator.from_text(line, d, n))
        return StabilizerGroup(gens, d=d, n=n)


def canonicalize(group: StabilizerGroup) -> StabilizerGroup:
    """Return a group rebuilt from its canonical rows (idempotent)."""
    return StabilizerGroup(group.rows or [], d=group.d, n=group.n)
