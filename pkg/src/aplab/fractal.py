"""Interval-replacement fractals on the circle.

Two constructions ship:

``ap1414``
    Red/blue colouring with no (14,14)-progression. One interval species,
    five-piece rule, symmetric under the half-turn-and-swap operator ``T``.
``ap3x30000``
    Colouring with no (3,30000)-progression. Two interval species (Type I and
    Type II) with their own rules; symmetric under reflection in 1/4.

Rules are stored in unit coordinates: a piece ``(lo, hi)`` of ``[0, 1]`` is
mapped into an uncoloured interval ``(a, b)`` with direction ``eps`` by
``f(x) = a + (b - a) x`` when ``eps = +1`` and ``f(x) = b - (b - a) x`` when
``eps = -1``. A child's direction is ``eps`` times the piece's multiplier.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .exact import (
    ONE,
    ZERO,
    Colour,
    Configuration,
    Interval,
    IntervalType,
    RationalLike,
    as_rational,
    canonical_pieces,
    locate,
    normalize_mod1,
    transform_interval,
)

F = Fraction
TYPE_I = IntervalType.TYPE_I
TYPE_II = IntervalType.TYPE_II
RED = Colour.RED
BLUE = Colour.BLUE

AP1414 = "ap1414"
AP3X30000 = "ap3x30000"


class UnknownConstruction(ValueError):
    pass


class NotReplaceable(ValueError):
    pass


class Piece(NamedTuple):
    lo: Fraction
    hi: Fraction
    colour: Colour | None = None
    ivl_type: IntervalType | None = None
    dir_mult: int = 1

    @property
    def is_coloured(self) -> bool:
        return self.colour is not None


def _unc(lo, hi, ivl_type, mult) -> Piece:
    return Piece(F(lo), F(hi), None, ivl_type, mult)


def _col(lo, hi, colour) -> Piece:
    return Piece(F(lo), F(hi), colour)


@dataclass(frozen=True)
class Construction:
    id: str
    initial: tuple[Interval, ...]
    rules: dict[IntervalType, tuple[Piece, ...]]
    max_level: int
    default_depth: int
    _bounds: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        for t, pieces in self.rules.items():
            assert pieces[0].lo == 0 and pieces[-1].hi == 1
            self._bounds[t] = [pc.hi for pc in pieces]


CONSTRUCTIONS: dict[str, Construction] = {
    AP1414: Construction(
        id=AP1414,
        initial=(
            Interval.coloured(0, F(1, 4), RED),
            Interval.uncoloured(F(1, 4), F(1, 2), +1),
            Interval.coloured(F(1, 2), F(3, 4), BLUE),
            Interval.uncoloured(F(3, 4), 1, -1),
        ),
        rules={
            TYPE_I: (
                _unc(0, F(1, 5), TYPE_I, +1),
                _col(F(1, 5), F(2, 5), BLUE),
                _unc(F(2, 5), F(3, 5), TYPE_I, -1),
                _col(F(3, 5), F(4, 5), RED),
                _unc(F(4, 5), 1, TYPE_I, +1),
            )
        },
        max_level=12,
        default_depth=12,
    ),
    AP3X30000: Construction(
        id=AP3X30000,
        initial=(
            Interval.uncoloured(0, F(1, 6), -1, TYPE_I),
            Interval.coloured(F(1, 6), F(1, 3), BLUE),
            Interval.uncoloured(F(1, 3), F(1, 2), +1, TYPE_I),
            Interval.coloured(F(1, 2), 1, BLUE),
        ),
        rules={
            # first child points outwards, third points inwards
            TYPE_I: (
                _unc(0, F(1, 288), TYPE_II, -1),
                _col(F(1, 288), F(7, 288), RED),
                _unc(F(7, 288), F(1, 36), TYPE_II, +1),
                _col(F(1, 36), F(1, 3), BLUE),
                _unc(F(1, 3), 1, TYPE_I, +1),
            ),
            TYPE_II: (
                _unc(0, F(1, 101), TYPE_II, +1),
                _col(F(1, 101), F(51, 101), BLUE),
                _unc(F(51, 101), 1, TYPE_I, +1),
            ),
        },
        max_level=10,
        default_depth=8,
    ),
}


def get_construction(construction_id: str) -> Construction:
    try:
        return CONSTRUCTIONS[construction_id]
    except KeyError:
        raise UnknownConstruction(
            f"unknown construction {construction_id!r}; expected one of {sorted(CONSTRUCTIONS)}"
        ) from None


def initial_config(construction_id: str) -> Configuration:
    cons = get_construction(construction_id)
    return Configuration(cons.initial, level=0, construction_id=cons.id)


def replace_interval(ivl: Interval, construction_id: str) -> list[Interval]:
    """Children of an uncoloured interval, in ascending position order."""
    if ivl.is_coloured:
        raise NotReplaceable(f"coloured interval {ivl!r} is never replaced")
    rules = get_construction(construction_id).rules
    try:
        pieces = rules[ivl.ivl_type]
    except KeyError:
        raise NotReplaceable(f"{construction_id} has no rule for Type {ivl.ivl_type.value}") from None
    a, b, eps = ivl.start, ivl.end, ivl.direction
    width = b - a
    out = []
    for pc in pieces:
        if eps > 0:
            lo, hi = a + width * pc.lo, a + width * pc.hi
        else:
            lo, hi = b - width * pc.hi, b - width * pc.lo
        if pc.is_coloured:
            out.append(Interval(lo, hi, colour=pc.colour))
        else:
            out.append(Interval(lo, hi, ivl_type=pc.ivl_type, direction=eps * pc.dir_mult))
    if eps < 0:
        out.reverse()
    return out


def step(config: Configuration) -> Configuration:
    out: list[Interval] = []
    for ivl in config.intervals:
        if ivl.is_coloured:
            out.append(ivl)
        else:
            out.extend(replace_interval(ivl, config.construction_id))
    return Configuration(out, level=config.level + 1, construction_id=config.construction_id)


def iterate(construction_id: str, k: int) -> Configuration:
    if k < 0:
        raise ValueError("level must be non-negative")
    config = initial_config(construction_id)
    for _ in range(k):
        config = step(config)
    return config


def iterate_levels(construction_id: str, k: int):
    """Yield ``c_0, c_1, ..., c_k``."""
    config = initial_config(construction_id)
    yield config
    for _ in range(k):
        config = step(config)
        yield config


def _find_piece(cons: Construction, ivl_type: IntervalType, u: Fraction) -> Piece:
    pieces = cons.rules[ivl_type]
    i = bisect_left(cons._bounds[ivl_type], u)
    pc = pieces[i]
    # u on a shared breakpoint: the closed coloured piece owns it
    if u == pc.hi and not pc.is_coloured:
        pc = pieces[i + 1]
    return pc


def colour_at(construction_id: str, x: RationalLike, max_depth: int) -> Colour | None:
    """Colour of circle point ``x`` in ``c_max_depth``; ``None`` if still uncoloured.

    Walks down through the single uncoloured interval containing ``x``, so the
    cost is O(max_depth) regardless of how many intervals ``c_k`` has.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be non-negative")
    cons = get_construction(construction_id)
    x = normalize_mod1(x)
    ivl = locate(initial_config(construction_id), x)
    if ivl.is_coloured:
        return ivl.colour
    width = ivl.end - ivl.start
    u = (x - ivl.start) / width if ivl.direction > 0 else (ivl.end - x) / width
    t = ivl.ivl_type
    for _ in range(max_depth):
        pc = _find_piece(cons, t, u)
        if pc.is_coloured:
            return pc.colour
        if pc.dir_mult > 0:
            u = (u - pc.lo) / (pc.hi - pc.lo)
        else:
            u = (pc.hi - u) / (pc.hi - pc.lo)
        t = pc.ivl_type
    return None


def apply_T(config: Configuration) -> Configuration:
    """Translate by 1/2, swap red and blue, reverse every direction."""
    half = F(1, 2)
    out: list[Interval] = []
    for ivl in config.intervals:
        if ivl.is_coloured:
            out += transform_interval(ivl, ivl.start + half, ivl.end + half, colour=ivl.colour.swap())
        else:
            out += transform_interval(ivl, ivl.start + half, ivl.end + half, direction=-ivl.direction)
    out = canonical_pieces(out, half)
    return Configuration(out, level=config.level, construction_id=config.construction_id)


def reflect(config: Configuration, center: RationalLike) -> Configuration:
    """Reflect ``x -> 2*center - x``; colours kept, directions reversed."""
    twice = 2 * as_rational(center)
    out: list[Interval] = []
    for ivl in config.intervals:
        lo, hi = twice - ivl.end, twice - ivl.start
        if ivl.is_coloured:
            out += transform_interval(ivl, lo, hi)
        else:
            out += transform_interval(ivl, lo, hi, direction=-ivl.direction)
    out = canonical_pieces(out, normalize_mod1(twice))
    return Configuration(out, level=config.level, construction_id=config.construction_id)


def measure(config: Configuration, colour: Colour | None) -> Fraction:
    """Exact total length coloured ``colour`` (``None`` sums the uncoloured part)."""
    return sum((ivl.length for ivl in config.intervals if ivl.colour is colour), ZERO)


@dataclass(frozen=True)
class LevelMeasures:
    level: int
    red: Fraction
    blue: Fraction
    uncoloured: Fraction
    uncoloured_by_type: dict


def level_measures(construction_id: str, k: int) -> LevelMeasures:
    """Exact colour measures of ``c_k`` without materializing it.

    Uncoloured intervals are tracked as a multiset of (type, length); the
    rules scale lengths independently of position and direction.
    """
    cons = get_construction(construction_id)
    red = blue = ZERO
    census: Counter = Counter()
    for ivl in cons.initial:
        if ivl.colour is RED:
            red += ivl.length
        elif ivl.colour is BLUE:
            blue += ivl.length
        else:
            census[ivl.ivl_type, ivl.length] += 1
    for _ in range(k):
        nxt: Counter = Counter()
        for (t, length), n in census.items():
            for pc in cons.rules[t]:
                w = length * (pc.hi - pc.lo)
                if pc.colour is RED:
                    red += n * w
                elif pc.colour is BLUE:
                    blue += n * w
                else:
                    nxt[pc.ivl_type, w] += n
        census = nxt
    by_type: dict = {}
    for (t, length), n in census.items():
        by_type[t] = by_type.get(t, ZERO) + n * length
    return LevelMeasures(k, red, blue, ONE - red - blue, by_type)


# ---------------------------------------------------------------- verifiers


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    where: object = None

    def __post_init__(self) -> None:
        if not self.passed and self.where is None:
            raise ValueError("failed checks must carry a witness")


@dataclass
class StructureReport:
    level: int
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, passed: bool, where=None) -> None:
        self.checks.append(Check(name, bool(passed), where))

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def summary(self) -> dict[str, tuple[int, int]]:
        """check name -> (passed, total)."""
        out: dict[str, list[int]] = {}
        for c in self.checks:
            row = out.setdefault(c.name, [0, 0])
            row[0] += c.passed
            row[1] += 1
        return {k: (v[0], v[1]) for k, v in out.items()}


def _first(items):
    return next(iter(items), None)


def verify_band_structure(config: Configuration, k: int) -> StructureReport:
    """Check the repeating blue / gap / red / gap pattern of ``c_k`` for ap1414.

    Every uncoloured interval must have length exactly ``1/(4*5^k)``, every
    coloured one at least that, and of any two cyclically adjacent coloured
    intervals at least one has exactly that length.
    """
    unit = F(1, 4 * 5**k)
    ivls = config.intervals
    n = len(ivls)
    report = StructureReport(k)

    bad = _first(ivls[i] for i in range(n) if ivls[i].is_coloured == ivls[(i + 1) % n].is_coloured)
    report.add("alternating-kind", bad is None, bad)

    coloured = [ivl for ivl in ivls if ivl.is_coloured]
    m = len(coloured)
    pairs = [(coloured[i], coloured[(i + 1) % m]) for i in range(m)]
    bad = _first(p for p in pairs if p[0].colour is p[1].colour)
    report.add("alternating-colour", m >= 2 and bad is None, bad or config)

    bad = _first(ivl for ivl in ivls if not ivl.is_coloured and ivl.length != unit)
    report.add("uncoloured-length", bad is None, bad)

    bad = _first(ivl for ivl in coloured if ivl.length < unit)
    report.add("coloured-length", bad is None, bad)

    bad = _first(p for p in pairs if p[0].length != unit and p[1].length != unit)
    report.add("adjacent-pair-exact", bad is None, bad)
    return report


def _red_overlap(config: Configuration, starts: list[Fraction], lo: Fraction, hi: Fraction) -> Fraction:
    """Longest stretch of a single red interval of ``config`` inside circle window ``[lo, hi]``."""
    best = ZERO
    for shift in (-1, 0, 1):
        a, b = max(lo + shift, ZERO), min(hi + shift, ONE)
        if a >= b:
            continue
        i = max(bisect_right(starts, a) - 1, 0)
        ivls = config.intervals
        while i < len(ivls) and ivls[i].start < b:
            ivl = ivls[i]
            if ivl.colour is RED:
                best = max(best, min(ivl.end, b) - max(ivl.start, a))
            i += 1
    return best


def _typeii_from_typei(prev: Configuration) -> set[tuple[Fraction, Fraction]]:
    out = set()
    for ivl in prev.intervals:
        if ivl.ivl_type is TYPE_I:
            for child in replace_interval(ivl, prev.construction_id):
                if child.ivl_type is TYPE_II:
                    out.add((child.start, child.end))
    return out


def verify_properties_1_to_4(construction_id: str, k: int) -> StructureReport:
    """Check the four neighbourhood properties of every uncoloured interval of ``c_k``.

    "Preceded", "behind", "succeeded" and "in front" are read along each
    interval's own direction. Properties 3 and 4 look for red in ``c_{k+1}``;
    Property 4 only applies to Type II intervals whose parent in ``c_{k-1}``
    was Type I, so it is vacuous at ``k = 0``.
    """
    if construction_id != AP3X30000:
        raise ValueError("Properties 1-4 are defined for ap3x30000 only")
    levels = list(iterate_levels(construction_id, k + 1))
    prev = levels[k - 1] if k >= 1 else None
    return check_properties(prev, levels[k], levels[k + 1])


def check_properties(prev: Configuration | None, cur: Configuration, nxt: Configuration) -> StructureReport:
    """Properties 1-4 on explicit ``c_{k-1}``, ``c_k``, ``c_{k+1}`` (``prev`` is None at level 0)."""
    from_type_i = _typeii_from_typei(prev) if prev is not None else set()
    nxt_starts = nxt.starts()
    ivls = cur.intervals
    n = len(ivls)
    report = StructureReport(cur.level)
    for i, ivl in enumerate(ivls):
        if ivl.is_coloured:
            continue
        ell = ivl.length
        eps = ivl.direction
        left, right = ivls[i - 1], ivls[(i + 1) % n]
        before, after = (left, right) if eps > 0 else (right, left)
        rear, front = (ivl.start, ivl.end) if eps > 0 else (ivl.end, ivl.start)
        if ivl.ivl_type is TYPE_I:
            report.add("property-1a", before.colour is BLUE and before.length >= F(11, 24) * ell, ivl)
            report.add("property-1b", after.colour is BLUE and after.length >= 3 * ell, ivl)
            lo, hi = sorted((rear, rear - eps * F(25, 24) * ell))
            report.add("property-3", _red_overlap(nxt, nxt_starts, lo, hi) >= ell / 48, ivl)
        else:
            report.add("property-2a", before.colour is RED and before.length >= 6 * ell, ivl)
            report.add("property-2b", after.colour is BLUE and after.length >= 6 * ell, ivl)
            if (ivl.start, ivl.end) in from_type_i:
                lo, hi = sorted((front, front + eps * 300 * ell))
                report.add("property-4", _red_overlap(nxt, nxt_starts, lo, hi) >= 4 * ell, ivl)
    return report


# ---------------------------------------------------------------- dumps


def interval_record(ivl: Interval) -> dict:
    from .exact import format_rational

    rec = {"start": format_rational(ivl.start), "end": format_rational(ivl.end)}
    if ivl.is_coloured:
        rec.update(kind="coloured", colour=ivl.colour.label)
    else:
        rec.update(kind="uncoloured", ivl_type=ivl.ivl_type.value, direction=ivl.direction)
    return rec


def config_to_dict(config: Configuration) -> dict:
    return {
        "construction": config.construction_id,
        "level": config.level,
        "intervals": [interval_record(ivl) for ivl in config.intervals],
    }


def config_from_dict(data: dict) -> Configuration:
    ivls = []
    for rec in data["intervals"]:
        if rec["kind"] == "coloured":
            ivls.append(Interval.coloured(rec["start"], rec["end"], Colour.parse(rec["colour"])))
        else:
            ivls.append(
                Interval.uncoloured(rec["start"], rec["end"], int(rec["direction"]), IntervalType(rec["ivl_type"]))
            )
    return Configuration(ivls, level=int(data["level"]), construction_id=data["construction"])


CSV_COLUMNS = ("start", "end", "kind", "colour", "ivl_type", "direction")


def config_to_csv(config: Configuration) -> str:
    import csv
    import io

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for ivl in config.intervals:
        writer.writerow(interval_record(ivl))
    return buf.getvalue()
