"""Position-indexed digit weights and the additive functionals they generate.

A seed assigns a real weight to every (position, digit) pair for a fixed
base g.  Summing the weights of the digits of n over a window of positions
gives a periodic, additive digit functional; shifting a seed re-indexes its
positions.  Named families:

  zero_seed(g)            every weight is 0
  sod_seed(g, a)          weight a*d at every position (scaled digit sum)
  reverse_seed(g, L, a)   weight a*d*g^(L-i-1) at position i, so the window
                          sum over L positions equals a times the reversal
                          of n within that window
  table_seed(g, rows)     explicit weight table, cycled or zero-extended

Weights are plain floats.  For phase work the package only ever needs a
weight mod 1, and ``Seed.frac`` guarantees an exact reduction: the named
families reduce their closed forms with integer arithmetic, so positions
with astronomically large weights still produce exact fractional parts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "Seed",
    "ZeroSeed",
    "SodSeed",
    "ReverseSeed",
    "TableSeed",
    "ShiftedSeed",
    "zero_seed",
    "sod_seed",
    "reverse_seed",
    "table_seed",
    "shift",
    "f_eval",
    "parse_seed",
]


class Seed:
    """Digit-weight table: deterministic map (position i, digit d) -> real."""

    base: int
    label: str

    def eval(self, i: int, d: int) -> float:
        raise NotImplementedError

    def frac(self, i: int, d: int) -> float:
        """Weight at (i, d) reduced mod 1.

        The default reduces the float weight with an exact fmod, which is
        exact whenever the weight itself is.  Families whose closed form
        outgrows float precision override this.
        """
        return self.eval(i, d) % 1.0

    def frac_rows(self, j: int, count: int) -> np.ndarray:
        """Array of shape (count, g) with frac(j + i, d) in row i."""
        g = self.base
        out = np.empty((count, g), dtype=np.float64)
        for i in range(count):
            for d in range(g):
                out[i, d] = self.frac(j + i, d)
        return out

    def _check(self, i: int, d: int) -> None:
        if i < 0:
            raise ValueError("position must be nonnegative")
        if not 0 <= d < self.base:
            raise ValueError(f"digit {d} out of range for base {self.base}")


@dataclass(frozen=True)
class ZeroSeed(Seed):
    base: int
    label: str = "zero"

    def eval(self, i: int, d: int) -> float:
        self._check(i, d)
        return 0.0

    def frac_rows(self, j: int, count: int) -> np.ndarray:
        return np.zeros((count, self.base), dtype=np.float64)


@dataclass(frozen=True)
class SodSeed(Seed):
    """Scaled digit sum: weight a*d at every position."""

    base: int
    scale: float
    label: str = "sod"

    def eval(self, i: int, d: int) -> float:
        self._check(i, d)
        return self.scale * d

    def frac(self, i: int, d: int) -> float:
        self._check(i, d)
        return float((Fraction(self.scale) * d) % 1)

    def frac_rows(self, j: int, count: int) -> np.ndarray:
        row = [self.frac(j, d) for d in range(self.base)]
        return np.tile(np.array(row, dtype=np.float64), (count, 1))


@dataclass(frozen=True)
class ReverseSeed(Seed):
    """Weights a*d*g^(L-i-1): window sums evaluate a times a digit reversal.

    Positions at or beyond L get fractional powers of g (exact rationals),
    so the seed stays defined for every position.
    """

    base: int
    window: int
    scale: float
    label: str = "reverse"

    def __post_init__(self) -> None:
        if self.window < 0:
            raise ValueError("window must be nonnegative")

    def eval(self, i: int, d: int) -> float:
        self._check(i, d)
        exp = self.window - i - 1
        if exp >= 0:
            return self.scale * d * self.base**exp
        return self.scale * d / self.base ** (-exp)

    def frac(self, i: int, d: int) -> float:
        self._check(i, d)
        if d == 0 or self.scale == 0:
            return 0.0
        num, den = Fraction(self.scale).as_integer_ratio()
        exp = self.window - i - 1
        if exp >= 0:
            r = (num * d * pow(self.base, exp, den)) % den
            return float(Fraction(r, den))
        return float(Fraction(num * d, den * self.base ** (-exp)) % 1)

    def frac_rows(self, j: int, count: int) -> np.ndarray:
        g = self.base
        out = np.zeros((count, g), dtype=np.float64)
        if self.scale == 0 or count == 0:
            return out
        num, den = Fraction(self.scale).as_integer_ratio()
        # Positions below the window share the ladder residue d*num*g^exp
        # mod den; walking i downward multiplies the residue by g, which
        # keeps the whole table exact at one modular multiply per step.
        top = min(count, max(0, self.window - j))
        if top > 0:
            exp0 = self.window - (j + top - 1) - 1
            base_res = (num * pow(g, exp0, den)) % den
            res = [(base_res * d) % den for d in range(g)]
            for i in range(top - 1, -1, -1):
                for d in range(1, g):
                    out[i, d] = float(Fraction(res[d], den))
                if i:
                    res = [(r * g) % den for r in res]
        for i in range(top, count):
            for d in range(1, g):
                out[i, d] = self.frac(j + i, d)
        return out


@dataclass(frozen=True)
class TableSeed(Seed):
    """Explicit weight table over finitely many positions.

    ``extend`` controls positions past the table: "cycle" re-reads the
    table periodically, "zero" pads with zero weights.
    """

    base: int
    rows: tuple[tuple[float, ...], ...]
    extend: str = "cycle"
    label: str = "table"

    def __post_init__(self) -> None:
        if self.extend not in ("cycle", "zero"):
            raise ValueError("extend must be 'cycle' or 'zero'")
        if not self.rows:
            raise ValueError("table seed needs at least one row")
        for row in self.rows:
            if len(row) != self.base:
                raise ValueError("each row needs one weight per digit")

    def eval(self, i: int, d: int) -> float:
        self._check(i, d)
        p = len(self.rows)
        if i < p:
            return self.rows[i][d]
        if self.extend == "cycle":
            return self.rows[i % p][d]
        return 0.0


@dataclass(frozen=True)
class ShiftedSeed(Seed):
    """View of another seed with all positions offset by a fixed amount."""

    inner: Seed
    offset: int

    def __post_init__(self) -> None:
        if self.offset < 0:
            raise ValueError("shift offset must be nonnegative")

    @property
    def base(self) -> int:  # type: ignore[override]
        return self.inner.base

    @property
    def label(self) -> str:  # type: ignore[override]
        return f"{self.inner.label}[{self.offset}]"

    def eval(self, i: int, d: int) -> float:
        return self.inner.eval(i + self.offset, d)

    def frac(self, i: int, d: int) -> float:
        return self.inner.frac(i + self.offset, d)

    def frac_rows(self, j: int, count: int) -> np.ndarray:
        return self.inner.frac_rows(j + self.offset, count)


def zero_seed(g: int) -> ZeroSeed:
    return ZeroSeed(g)


def sod_seed(g: int, a: float) -> SodSeed:
    return SodSeed(g, a)


def reverse_seed(g: int, L: int, a: float) -> ReverseSeed:
    return ReverseSeed(g, L, a)


def table_seed(g: int, rows, extend: str = "cycle") -> TableSeed:
    frozen = tuple(tuple(float(v) for v in row) for row in rows)
    return TableSeed(g, frozen, extend)


def shift(seed: Seed, j: int) -> Seed:
    """Seed whose position i reads the original position i + j."""
    if j < 0:
        raise ValueError("shift offset must be nonnegative")
    if j == 0:
        return seed
    if isinstance(seed, ShiftedSeed):
        return ShiftedSeed(seed.inner, seed.offset + j)
    return ShiftedSeed(seed, j)


def f_eval(seed: Seed, lam: int, j: int, n: int) -> float:
    """Sum of shifted weights over the low lam digits of n.

    Position i of n (i < lam) contributes the weight at seed position
    i + j for digit i of n.  The value is periodic in n with period
    g^lam and additive across digit blocks.
    """
    if lam < 0:
        raise ValueError("window length must be nonnegative")
    if j < 0:
        raise ValueError("shift must be nonnegative")
    if n < 0:
        raise ValueError("argument must be a nonnegative integer")
    g = seed.base
    total = 0.0
    for i in range(lam):
        n, d = divmod(n, g)
        total += seed.eval(i + j, d)
    return total


def parse_seed(text: str, g: int) -> Seed:
    """Seed family from a config string: "zero", "sod:a", "reverse:a,L"."""
    name, _, args = text.partition(":")
    name = name.strip().lower()
    if name == "zero":
        if args:
            raise ValueError("zero seed takes no parameters")
        return zero_seed(g)
    if name == "sod":
        return sod_seed(g, float(args))
    if name == "reverse":
        a_str, _, l_str = args.partition(",")
        return reverse_seed(g, int(l_str), float(a_str))
    raise ValueError(f"unknown seed family {name!r}")
