"""Exact circle geometry: rationals, colours, intervals and configurations.

Every breakpoint is a :class:`fractions.Fraction`; nothing here ever touches
floating point. The circle R/Z is stored cut at 0, so a configuration is an
ordered partition of ``[0, 1]`` whose first interval starts at 0 and whose last
interval ends at 1.
"""

from __future__ import annotations

import enum
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Iterable, Sequence, Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)


class Colour(str, enum.Enum):
    RED = "R"
    BLUE = "B"

    def swap(self) -> "Colour":
        return Colour.BLUE if self is Colour.RED else Colour.RED

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, text: str) -> "Colour":
        key = text.strip().upper()
        for c in cls:
            if key in (c.value, c.name):
                return c
        raise ValueError(f"not a colour: {text!r}")


class IntervalType(str, enum.Enum):
    TYPE_I = "I"
    TYPE_II = "II"


class InvalidConfiguration(ValueError):
    pass


def as_rational(x: RationalLike) -> Fraction:
    """Coerce ints, Fractions and ``"num/den"`` strings; floats are refused."""
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted; use Fraction or 'num/den'")
    return Fraction(x)


def format_rational(x: Fraction) -> str:
    """Serialize as ``"num/den"`` (integers as ``"n/1"``)."""
    return f"{x.numerator}/{x.denominator}"


def normalize_mod1(x: RationalLike) -> Fraction:
    """Canonical representative of ``x`` in ``[0, 1)``."""
    x = as_rational(x)
    return x - floor(x)


@dataclass(frozen=True, slots=True)
class Interval:
    """A piece of a configuration.

    Coloured intervals are closed ``[start, end]``; uncoloured ones are open
    ``(start, end)`` and carry a type and a direction (+1 forwards, -1 backwards).
    """

    start: Fraction
    end: Fraction
    colour: Colour | None = None
    ivl_type: IntervalType | None = None
    direction: int | None = None

    def __post_init__(self) -> None:
        if not (0 <= self.start < self.end <= 1):
            raise InvalidConfiguration(f"bad bounds [{self.start}, {self.end}]")
        if self.colour is None:
            if self.direction not in (1, -1) or self.ivl_type is None:
                raise InvalidConfiguration("uncoloured interval needs a type and a direction of +-1")
        elif self.direction is not None or self.ivl_type is not None:
            raise InvalidConfiguration("coloured interval cannot carry a type or direction")

    @classmethod
    def coloured(cls, start: RationalLike, end: RationalLike, colour: Colour) -> "Interval":
        return cls(as_rational(start), as_rational(end), colour=colour)

    @classmethod
    def uncoloured(
        cls,
        start: RationalLike,
        end: RationalLike,
        direction: int,
        ivl_type: IntervalType = IntervalType.TYPE_I,
    ) -> "Interval":
        return cls(as_rational(start), as_rational(end), ivl_type=ivl_type, direction=direction)

    @property
    def is_coloured(self) -> bool:
        return self.colour is not None

    @property
    def length(self) -> Fraction:
        return self.end - self.start

    def contains(self, x: Fraction) -> bool:
        if self.is_coloured:
            return self.start <= x <= self.end
        return self.start < x < self.end

    def __repr__(self) -> str:
        if self.is_coloured:
            return f"[{self.start}, {self.end}] {self.colour.label}"
        sign = "+" if self.direction > 0 else "-"
        return f"({self.start}, {self.end}) {self.ivl_type.value}{sign}"


@dataclass(frozen=True)
class Configuration:
    """Ordered exact partition of the circle into intervals (the state ``c_k``)."""

    intervals: tuple[Interval, ...]
    level: int = 0
    construction_id: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "intervals", tuple(self.intervals))
        self.validate()

    def validate(self) -> None:
        ivls = self.intervals
        if not ivls:
            raise InvalidConfiguration("empty configuration")
        if ivls[0].start != 0 or ivls[-1].end != 1:
            raise InvalidConfiguration("configuration must span [0, 1]")
        for left, right in zip(ivls, ivls[1:]):
            if left.end != right.start:
                raise InvalidConfiguration(f"gap or overlap between {left!r} and {right!r}")
            if left.is_coloured and right.is_coloured and left.colour is not right.colour:
                raise InvalidConfiguration(f"point {left.end} would receive two colours")
        first, last = ivls[0], ivls[-1]
        if first.is_coloured and last.is_coloured and first.colour is not last.colour:
            raise InvalidConfiguration("point 0 would receive two colours")

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __getitem__(self, i: int) -> Interval:
        return self.intervals[i]

    def same_partition(self, other: "Configuration") -> bool:
        """Equality of the canonical interval lists (level and id ignored)."""
        return self.intervals == other.intervals

    def total_length(self) -> Fraction:
        return sum((ivl.length for ivl in self.intervals), ZERO)

    def starts(self) -> list[Fraction]:
        return [ivl.start for ivl in self.intervals]

    def uncoloured(self) -> list[Interval]:
        return [ivl for ivl in self.intervals if not ivl.is_coloured]


def locate(config: Configuration, x: RationalLike, starts: Sequence[Fraction] | None = None) -> Interval:
    """Return the interval containing circle point ``x``.

    Shared endpoints belong to the closed coloured interval. The point 0 is
    identified with 1, so a coloured interval ending at 1 owns it.
    Pass precomputed ``starts`` when locating many points in one configuration.
    """
    x = normalize_mod1(x)
    ivls = config.intervals
    if x == 0:
        last, first = ivls[-1], ivls[0]
        if last.is_coloured:
            return last
        if first.is_coloured:
            return first
        # 0 lies inside an uncoloured arc that was cut at the origin
        return first
    if starts is None:
        starts = config.starts()
    i = bisect_right(starts, x) - 1
    ivl = ivls[i]
    if x == ivl.start and i > 0 and ivls[i - 1].is_coloured:
        return ivls[i - 1]
    if ivl.contains(x):
        return ivl
    # x sits on ivl.start, ivl is open and its left neighbour is open too
    return ivl


def same_body(x: Interval, y: Interval) -> bool:
    return x.colour is y.colour and x.ivl_type is y.ivl_type and x.direction == y.direction


def canonical_pieces(pieces: Iterable[Interval], seam: Fraction) -> list[Interval]:
    """Sort transformed pieces and rejoin the two halves of an arc cut only by the old origin.

    ``seam`` is where the old cut point landed; two pieces meeting there with
    identical bodies were one arc of the circle.
    """
    out = sorted(pieces, key=lambda ivl: ivl.start)
    if seam != 0:
        for i in range(1, len(out)):
            left, right = out[i - 1], out[i]
            if left.end == seam and same_body(left, right):
                merged = Interval(left.start, right.end, left.colour, left.ivl_type, left.direction)
                out[i - 1 : i + 1] = [merged]
                break
    return out


def transform_interval(
    ivl: Interval, lo: Fraction, hi: Fraction, **changes
) -> list[Interval]:
    """Place an interval at circle position ``[lo, hi]`` (``hi - lo`` = its length).

    ``lo`` may be any rational; the result is normalized into ``[0, 1]`` and
    split in two when it straddles the cut at 0.
    """
    shift = floor(lo)
    lo, hi = lo - shift, hi - shift
    fields = dict(colour=ivl.colour, ivl_type=ivl.ivl_type, direction=ivl.direction)
    fields.update(changes)
    if hi <= 1:
        return [Interval(lo, hi, **fields)]
    return [Interval(lo, ONE, **fields), Interval(ZERO, hi - 1, **fields)]
