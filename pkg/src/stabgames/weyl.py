"""Generalized Pauli (shift/phase) algebra for dimension-d qudits.

Canonical form is

    w^phase * prod_j X_j^{x_j} Z_j^{z_j},   w = exp(i*pi/d),

with exponents in Z_d and the global phase tracked in Z_{2d}.  The phase
group is Z_{2d} rather than Z_d because daggers and reorderings of
X^a Z^b factors close only over half-angle phases when d is even.  The
commutation rule is Z X = omega X Z with omega = w^2 = exp(2*pi*i/d);
at d=2 this embeds the qubit algebra exactly (w = i).

Everything is exact integer arithmetic; no floating point.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .pauli import PauliOperator

# One qudit factor for ordered products: (site, x exponent, z exponent).
QuditFactor = Tuple[int, int, int]


@dataclass(frozen=True)
class WeylOperator:
    d: int
    n: int
    x: Tuple[int, ...]
    z: Tuple[int, ...]
    phase: int  # exponent of exp(i*pi/d), mod 2d

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("qudit dimension must be >= 2")
        if len(self.x) != self.n or len(self.z) != self.n:
            raise ValueError("exponent vectors must have length n")
        object.__setattr__(self, "x", tuple(v % self.d for v in self.x))
        object.__setattr__(self, "z", tuple(v % self.d for v in self.z))
        object.__setattr__(self, "phase", self.phase % (2 * self.d))

    @staticmethod
    def identity(d: int, n: int) -> "WeylOperator":
        return WeylOperator(d, n, (0,) * n, (0,) * n, 0)

    @staticmethod
    def single(d: int, n: int, site: int, x_exp: int, z_exp: int, phase: int = 0) -> "WeylOperator":
        if not 0 <= site < n:
            raise ValueError(f"site {site} outside register of size {n}")
        xs = [0] * n
        zs = [0] * n
        xs[site] = x_exp
        zs[site] = z_exp
        return WeylOperator(d, n, tuple(xs), tuple(zs), phase)

    @staticmethod
    def from_pauli(p: PauliOperator) -> "WeylOperator":
        xs = tuple((p.x >> j) & 1 for j in range(p.n))
        zs = tuple((p.z >> j) & 1 for j in range(p.n))
        return WeylOperator(2, p.n, xs, zs, p.phase)

    def to_pauli(self) -> PauliOperator:
        if self.d != 2:
            raise ValueError("only d=2 operators convert to PauliOperator")
        x = sum(b << j for j, b in enumerate(self.x))
        z = sum(b << j for j, b in enumerate(self.z))
        return PauliOperator(self.n, x, z, self.phase)

    def is_identity(self) -> bool:
        return self.phase == 0 and not any(self.x) and not any(self.z)

    def is_scalar(self) -> bool:
        return not any(self.x) and not any(self.z)

    def phase_value(self) -> complex:
        return cmath.exp(1j * cmath.pi * self.phase / self.d)

    def support(self) -> List[int]:
        return [j for j in range(self.n) if self.x[j] or self.z[j]]

    def __mul__(self, other: "WeylOperator") -> "WeylOperator":
        return w_multiply(self, other)

    def scale_w(self, k: int) -> "WeylOperator":
        """Multiply by w^k = exp(i*pi*k/d)."""
        return WeylOperator(self.d, self.n, self.x, self.z, self.phase + k)

    def to_text(self) -> str:
        parts = [f"w^{self.phase}"]
        for j in range(self.n):
            if self.x[j]:
                parts.append(f"X{j}^{self.x[j]}")
            if self.z[j]:
                parts.append(f"Z{j}^{self.z[j]}")
        return " ".join(parts)

    @staticmethod
    def from_text(text: str, d: int, n: int) -> "WeylOperator":
        phase = 0
        xs = [0] * n
        zs = [0] * n
        for tok in text.split():
            if tok.startswith("w^"):
                phase = int(tok[2:])
                continue
            body, _, exp = tok.partition("^")
            e = int(exp) if exp else 1
            letter, site = body[0].upper(), int(body[1:])
            if not 0 <= site < n:
                raise ValueError(f"site {site} outside register of size {n}")
            if letter == "X":
                xs[site] = (xs[site] + e) % d
            elif letter == "Z":
                zs[site] = (zs[site] + e) % d
            else:
                raise ValueError(f"bad token {tok!r}")
        return WeylOperator(d, n, tuple(xs), tuple(zs), phase)


def w_multiply(p: WeylOperator, q: WeylOperator) -> WeylOperator:
    """Canonical form of the matrix product p*q (q applied first)."""
    if p.d != q.d or p.n != q.n:
        raise ValueError("dimension/register mismatch")
    # Move Z^{z_p} through X^{x_q}: omega^{z_p . x_q} = w^{2 z_p . x_q}.
    cross = sum(zp * xq for zp, xq in zip(p.z, q.x))
    return WeylOperator(
        p.d,
        p.n,
        tuple(a + b for a, b in zip(p.x, q.x)),
        tuple(a + b for a, b in zip(p.z, q.z)),
        p.phase + q.phase + 2 * cross,
    )


def commutation_phase(p: WeylOperator, q: WeylOperator) -> int:
    """k in Z_d such that p q = omega^k q p, omega = exp(2*pi*i/d)."""
    if p.d != q.d or p.n != q.n:
        raise ValueError("dimension/register mismatch")
    k = sum(qx * pz - px * qz for px, pz, qx, qz in zip(p.x, p.z, q.x, q.z))
    return k % p.d


def dagger(p: WeylOperator) -> WeylOperator:
    """Exact adjoint: (w^f X^a Z^b)^dag = w^{-f+2ab} X^{-a} Z^{-b} per site."""
    cross = sum(a * b for a, b in zip(p.x, p.z))
    return WeylOperator(
        p.d,
        p.n,
        tuple(-a for a in p.x),
        tuple(-b for b in p.z),
        -p.phase + 2 * cross,
    )


def w_power(p: WeylOperator, m: int) -> WeylOperator:
    """m-th power (m may be negative)."""
    if m < 0:
        return w_power(dagger(p), -m)
    acc = WeylOperator.identity(p.d, p.n)
    base = p
    while m:
        if m & 1:
            acc = w_multiply(acc, base)
        base = w_multiply(base, base)
        m >>= 1
    return acc


def ordered_w_product(seq: Sequence[QuditFactor], d: int, n: int) -> WeylOperator:
    """Product of per-site X^a Z^b factors, first element applied first."""
    acc = WeylOperator.identity(d, n)
    for site, a, b in seq:
        acc = w_multiply(WeylOperator.single(d, n, site, a, b), acc)
    return acc
