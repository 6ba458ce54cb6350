"""Combinatorial analysers: gaps and tables on periodic integer colourings,
the explicit red-count bound, and ladders.

A *gap* is a progression of consecutive integers with red ends and a blue
interior. A *table* ``d[-l, m]`` is a window of multiples of ``d`` with red
ends in which every gap among the multiples has ``n2 - n1 <= (m + l)/(k + 1)``.
A *ladder* is a non-decreasing rational sequence with steps of at most 1/4 and
last minus first equal to 1; such a sequence must meet any closed arc of
length 1/4 once reduced mod 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Container, Sequence

from .exact import RationalLike, as_rational, format_rational, normalize_mod1
from .search import RED, CyclicColouring, make_rng

F = Fraction
QUARTER = F(1, 4)
BLUE_ARC = (F(1, 2), F(3, 4))


class InvalidParameter(ValueError):
    pass


class OutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class PeriodicZColouring:
    """Colouring of Z pulled back from Z/pZ; ``n in c`` tests redness."""

    colours: str

    def __post_init__(self) -> None:
        if not self.colours or set(self.colours) - {"R", "B"}:
            raise ValueError("periodic colouring must be a non-empty string over R and B")

    @classmethod
    def from_cyclic(cls, c: CyclicColouring) -> "PeriodicZColouring":
        if not c.is_total:
            raise ValueError("colouring has unresolved residues")
        return cls(c.colours)

    @property
    def p(self) -> int:
        return len(self.colours)

    def is_red(self, n: int) -> bool:
        return self.colours[n % self.p] == RED

    __contains__ = is_red


@dataclass(frozen=True)
class Gap:
    start: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.start


def find_gaps(c: PeriodicZColouring, window: tuple[int, int]) -> list[Gap]:
    """Gaps between consecutive reds of ``c`` inside the closed integer window."""
    lo, hi = window
    if hi <= lo:
        raise InvalidParameter("window must contain at least two integers")
    reds = [n for n in range(lo, hi + 1) if c.is_red(n)]
    return [Gap(r, s) for r, s in zip(reds, reds[1:])]


def is_table(reds: Container[int], d: int, ell: int, m: int, k: int) -> bool:
    """Whether ``d[-ell, m]`` is a table for the red set ``reds``.

    ``reds`` only needs membership tests at multiples of ``d``; a
    :class:`PeriodicZColouring` works directly.
    """
    if min(d, ell, m, k) <= 0:
        raise InvalidParameter("d, ell, m and k must be positive")
    if -ell * d not in reds or m * d not in reds:
        return False
    red_steps = [n for n in range(-ell, m + 1) if n * d in reds]
    # n2 - n1 <= (m + ell)/(k + 1), kept in integers
    return all((n2 - n1) * (k + 1) <= m + ell for n1, n2 in zip(red_steps, red_steps[1:]))


def lemma1_bound(m: RationalLike, k: int) -> int:
    """Upper bound ``3(k+1)^c - 1`` on the reds in ``[0, m d]`` when ``[0, d]`` is a gap.

    ``c`` is the least integer with ``m <= ((k+1)/k)^c``, found by exact
    repeated multiplication.
    """
    m = as_rational(m)
    if m < 1 or k < 1:
        raise InvalidParameter("need m >= 1 and k >= 1")
    ratio = F(k + 1, k)
    c, power = 0, F(1)
    while m > power:
        power *= ratio
        c += 1
    return 3 * (k + 1) ** c - 1


# ---------------------------------------------------------------- ladders

CASE_RANGES: dict[int, tuple[Fraction, Fraction]] = {
    2: (F(1, 4), F(5, 16)),
    3: (F(5, 16), F(7, 20)),
    4: (F(7, 20), F(2, 5)),
}

# each term is (multiple of d, constant) added to the anchor a
_LADDER_TERMS: dict[int, tuple[tuple[int, Fraction], ...]] = {
    2: ((0, F(0)), (4, F(-1)), (1, F(0)), (5, F(-1)), (2, F(0)), (6, F(-1)), (3, F(0)), (0, F(1))),
    3: ((0, F(0)), (5, F(-3, 2)), (1, F(0)), (3, F(-1, 2)), (2, F(0)), (4, F(-1, 2)), (0, F(1))),
    4: (
        (0, F(0)), (3, F(-1)), (6, F(-2)), (1, F(0)), (4, F(-1)),
        (7, F(-2)), (2, F(0)), (5, F(-1)), (0, F(1)),
    ),
}


@dataclass(frozen=True)
class Ladder:
    terms: tuple[Fraction, ...]


def build_ladder(case_id: int, a: RationalLike, d: RationalLike) -> Ladder:
    """The explicit ladder for common differences ``d`` in the given case range."""
    if case_id not in CASE_RANGES:
        raise InvalidParameter(f"ladder case must be 2, 3 or 4, not {case_id}")
    a, d = as_rational(a), as_rational(d)
    lo, hi = CASE_RANGES[case_id]
    if not lo <= d <= hi:
        raise OutOfRange(f"d={d} outside [{lo}, {hi}] for case {case_id}")
    return Ladder(tuple(a + mult * d + const for mult, const in _LADDER_TERMS[case_id]))


def verify_ladder(ladder: Ladder | Sequence[Fraction]) -> bool:
    terms = ladder.terms if isinstance(ladder, Ladder) else tuple(ladder)
    if len(terms) < 2:
        return False
    steps = [y - x for x, y in zip(terms, terms[1:])]
    return all(0 <= s <= QUARTER for s in steps) and terms[-1] - terms[0] == 1


def ladder_hits_arc(ladder: Ladder, arc: tuple[Fraction, Fraction] = BLUE_ARC) -> bool:
    lo, hi = arc
    return any(lo <= normalize_mod1(t) <= hi for t in ladder.terms)


def sample_range(lo: Fraction, hi: Fraction, n: int) -> list[Fraction]:
    """``n`` evenly spaced rationals from ``lo`` to ``hi`` inclusive."""
    if n == 1:
        return [lo]
    return [lo + (hi - lo) * F(i, n - 1) for i in range(n)]


def random_rationals(seed: int, n: int, max_den: int = 10_000) -> list[Fraction]:
    rng = make_rng(seed)
    dens = rng.integers(1, max_den + 1, size=n).tolist()
    return [F(int(rng.integers(0, q)), q) for q in dens]


def ladder_sweep(samples: int, anchors: int, seed: int) -> list[dict]:
    """Per case: do all sampled ladders satisfy the axioms and meet the blue arc?"""
    anchor_list = random_rationals(seed, anchors)
    rows = []
    for case_id, (lo, hi) in CASE_RANGES.items():
        ok = hit = 0
        first_bad = None
        for d in sample_range(lo, hi, samples):
            for a in anchor_list:
                lad = build_ladder(case_id, a, d)
                good, met = verify_ladder(lad), ladder_hits_arc(lad)
                ok += good
                hit += met
                if first_bad is None and not (good and met):
                    first_bad = {"a": format_rational(a), "d": format_rational(d)}
        rows.append(
            {
                "case": case_id,
                "d_range": [format_rational(lo), format_rational(hi)],
                "ladders": samples * anchors,
                "valid": ok,
                "hit_blue": hit,
                "first_failure": first_bad,
            }
        )
    return rows
