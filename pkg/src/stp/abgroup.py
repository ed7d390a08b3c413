"""Finitely generated abelian groups in invariant-factor normal form."""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import reduce


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def invariant_factors(orders) -> tuple[int, ...]:
    """Regroup a list of cyclic orders into a divisibility chain q_1 | q_2 | ...

    Orders equal to 1 are dropped; 0 is not allowed here (free summands are
    tracked separately as a rank).
    """
    powers: dict[int, list[int]] = {}
    for q in orders:
        q = int(q)
        if q < 0:
            q = -q
        if q == 0:
            raise ValueError("free summand passed as torsion order")
        for p, e in _factor(q).items():
            powers.setdefault(p, []).append(p ** e)
    if not powers:
        return ()
    length = max(len(v) for v in powers.values())
    chain = [1] * length
    for p, pp in powers.items():
        pp.sort()
        for i, x in enumerate(reversed(pp)):
            chain[length - 1 - i] *= x
    return tuple(chain)


@dataclass(frozen=True, order=True)
class AbGroup:
    """Z^rank + Z/q_1 + ... + Z/q_t with q_1 | q_2 | ... and every q_i >= 2."""

    rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("negative rank")
        t = tuple(int(q) for q in self.torsion)
        if any(q < 2 for q in t):
            raise ValueError(f"torsion orders must be >= 2, got {t}")
        if any(t[i + 1] % t[i] for i in range(len(t) - 1)):
            raise ValueError(f"torsion orders {t} do not form a divisibility chain")
        object.__setattr__(self, "torsion", t)

    @classmethod
    def from_cyclic(cls, rank: int, orders) -> AbGroup:
        return cls(rank, invariant_factors(o for o in orders if abs(int(o)) != 1))

    @classmethod
    def parse(cls, text: str) -> AbGroup:
        """Parse "Z", "Z/6", "Z^2 + Z/2", "0" and friends."""
        s = text.replace(" ", "")
        if s in ("", "0"):
            return cls()
        rank, orders = 0, []
        for term in s.split("+"):
            m = re.fullmatch(r"Z(?:\^(\d+))?", term)
            if m:
                rank += int(m.group(1) or 1)
                continue
            m = re.fullmatch(r"(?:\(Z/(\d+)\)|Z/(\d+))(?:\^(\d+))?", term)
            if m:
                q = int(m.group(1) or m.group(2))
                if q < 1:
                    raise ValueError(f"bad cyclic order in {text!r}")
                orders.extend([q] * int(m.group(3) or 1))
                continue
            if term == "0":
                continue
            raise ValueError(f"cannot parse abelian group {text!r}")
        return cls.from_cyclic(rank, orders)

    def __str__(self) -> str:
        if self.is_trivial:
            return "0"
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        parts.extend(f"Z/{q}" for q in self.torsion)
        return " + ".join(parts)

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    @property
    def is_finite(self) -> bool:
        return self.rank == 0

    @property
    def order(self) -> int:
        if not self.is_finite:
            raise ValueError(f"{self} is infinite")
        return math.prod(self.torsion)

    def cyclic_orders(self) -> tuple[int, ...]:
        """Orders of the cyclic summands, 0 for Z, free part first."""
        return (0,) * self.rank + self.torsion

    def __add__(self, other: AbGroup) -> AbGroup:
        return direct_sum(self, other)

    # element arithmetic for finite groups: elements are tuples mod torsion
    def zero(self) -> tuple[int, ...]:
        return (0,) * (self.rank + len(self.torsion))

    def add(self, a, b) -> tuple[int, ...]:
        return tuple(self._reduce(i, x + y) for i, (x, y) in enumerate(zip(a, b)))

    def neg(self, a) -> tuple[int, ...]:
        return tuple(self._reduce(i, -x) for i, x in enumerate(a))

    def _reduce(self, i: int, x: int) -> int:
        if i < self.rank:
            return x
        return x % self.torsion[i - self.rank]

    def elements(self):
        if not self.is_finite:
            raise ValueError(f"cannot enumerate the infinite group {self}")
        return itertools.product(*(range(q) for q in self.torsion))


Z = AbGroup(1)
TRIVIAL = AbGroup()


def cyclic(q: int) -> AbGroup:
    return AbGroup.from_cyclic(0, [q]) if q else Z


def direct_sum(*groups: AbGroup) -> AbGroup:
    rank = sum(g.rank for g in groups)
    return AbGroup.from_cyclic(rank, [q for g in groups for q in g.torsion])


def tensor(g: AbGroup, h: AbGroup) -> AbGroup:
    """g (x) h computed summand by summand."""
    rank = g.rank * h.rank
    orders = []
    for a in g.cyclic_orders():
        for b in h.cyclic_orders():
            if a == 0 and b == 0:
                continue
            orders.append(math.gcd(a, b))
    return AbGroup.from_cyclic(rank, orders)


def tor(g: AbGroup, h: AbGroup) -> AbGroup:
    """Tor_1^Z(g, h); only torsion-torsion pairs contribute."""
    return AbGroup.from_cyclic(0, [math.gcd(a, b) for a in g.torsion for b in h.torsion])


def sum_all(groups) -> AbGroup:
    return reduce(direct_sum, groups, TRIVIAL)
