"""Induced colourings of Z/pZ and exhaustive (a,b)-progression search.

An (a,b)-AP with difference ``d`` is ``start, start+d, ..., start+(a+b-1)d``
(mod p) whose first ``a`` terms are red and last ``b`` terms blue. For a
partial colouring the test weakens to "first a not blue, last b not red".
Terms may revisit residues when ``a + b > p``; each index is checked on its own.

Two engines answer the same question:

* :func:`find_pattern_naive` scans ``d`` then ``start`` directly. It is the oracle.
* :func:`find_pattern_orbit` walks each orbit ``0, d, 2d, ...`` once and reads
  every start off cyclic run lengths, O(p) per difference, vectorized with numpy.

Both return the first witness in canonical order: smallest ``d``, then smallest start.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, gcd
from typing import Iterable, Sequence

import numpy as np

from .exact import Colour
from .fractal import colour_at, get_construction

RED = Colour.RED.value
BLUE = Colour.BLUE.value
UNRESOLVED = "U"
_ALPHABET = frozenset(RED + BLUE + UNRESOLVED)

# int64 cells per numpy batch in the orbit engine
_BATCH_CELLS = 1 << 22


@dataclass(frozen=True)
class PatternSpec:
    a: int
    b: int

    def __post_init__(self) -> None:
        if self.a < 0 or self.b < 0 or self.a + self.b < 1:
            raise ValueError(f"invalid pattern ({self.a},{self.b}): need a, b >= 0 and a + b >= 1")

    @property
    def length(self) -> int:
        return self.a + self.b

    def __str__(self) -> str:
        return f"({self.a},{self.b})"


@dataclass(frozen=True)
class APWitness:
    start: int
    d: int
    pattern: PatternSpec

    def elements(self, p: int) -> list[int]:
        return [(self.start + i * self.d) % p for i in range(self.pattern.length)]

    def to_dict(self) -> dict:
        return {"start": self.start, "d": self.d, "a": self.pattern.a, "b": self.pattern.b}

    @classmethod
    def from_dict(cls, data: dict) -> "APWitness":
        return cls(int(data["start"]), int(data["d"]), PatternSpec(int(data["a"]), int(data["b"])))


@dataclass(frozen=True)
class CyclicColouring:
    """Colouring of Z/pZ as a string over ``R``, ``B`` and (if partial) ``U``."""

    colours: str
    construction: str = "external"
    depth: int | None = None
    fill: Colour | None = None

    def __post_init__(self) -> None:
        if not self.colours:
            raise ValueError("empty colouring")
        bad = set(self.colours) - _ALPHABET
        if bad:
            raise ValueError(f"unexpected symbols {sorted(bad)} in colouring")

    @property
    def p(self) -> int:
        return len(self.colours)

    @property
    def unresolved(self) -> int:
        return self.colours.count(UNRESOLVED)

    @property
    def is_total(self) -> bool:
        return UNRESOLVED not in self.colours

    def count(self, colour: Colour) -> int:
        return self.colours.count(colour.value)

    def filled(self, colour: Colour) -> "CyclicColouring":
        return CyclicColouring(
            self.colours.replace(UNRESOLVED, colour.value), self.construction, self.depth, colour
        )

    def meta(self) -> dict:
        return {
            "construction": self.construction,
            "depth": self.depth,
            "fill": self.fill.label if self.fill else None,
            "unresolved": self.unresolved,
        }

    def to_text(self) -> str:
        return f"{self.p}\n{self.colours}\n"

    def to_json(self) -> str:
        return json.dumps({"p": self.p, "colours": self.colours, "meta": self.meta()}, sort_keys=True)

    @classmethod
    def from_text(cls, text: str) -> "CyclicColouring":
        text = text.strip()
        if text.startswith("{"):
            data = json.loads(text)
            meta = data.get("meta") or {}
            fill = meta.get("fill")
            c = cls(
                data["colours"],
                meta.get("construction") or "external",
                meta.get("depth"),
                Colour.parse(fill) if fill else None,
            )
            p = int(data.get("p", c.p))
        else:
            lines = text.split()
            if len(lines) != 2:
                raise ValueError("text colouring must be 'p' on line 1 and the colour string on line 2")
            p, c = int(lines[0]), cls(lines[1].upper())
        if p != c.p:
            raise ValueError(f"declared modulus {p} does not match {c.p} colours")
        return c

    def _masks(self) -> tuple[np.ndarray, np.ndarray]:
        """(not-blue, not-red) masks; on total colourings these are (red, blue)."""
        arr = np.frombuffer(self.colours.encode("ascii"), dtype=np.uint8)
        return arr != ord(BLUE), arr != ord(RED)


# ---------------------------------------------------------------- induction


def induce(construction_id: str, p: int, depth: int | None = None, fill: Colour | None = None) -> CyclicColouring:
    """Colour residue ``i`` by the construction's colour at ``i/p`` after ``depth`` levels.

    With ``fill=None`` the result is partial (``U`` where still uncoloured);
    otherwise unresolved residues take ``fill``.
    """
    cons = get_construction(construction_id)
    if p < 2:
        raise ValueError("modulus must be at least 2")
    if depth is None:
        depth = cons.default_depth
    if depth < 0:
        raise ValueError("depth must be non-negative")
    chars = []
    for i in range(p):
        c = colour_at(construction_id, Fraction(i, p), depth)
        chars.append(UNRESOLVED if c is None else c.value)
    partial = CyclicColouring("".join(chars), construction_id, depth, None)
    return partial if fill is None else partial.filled(fill)


# ---------------------------------------------------------------- naive oracle


def _naive(colours: str, spec: PatternSpec, first_bad: str, last_bad: str) -> APWitness | None:
    p = len(colours)
    a, n = spec.a, spec.length
    for d in range(1, p):
        for start in range(p):
            x = start
            for i in range(n):
                if colours[x] == (first_bad if i < a else last_bad):
                    break
                x = (x + d) % p
            else:
                return APWitness(start, d, spec)
    return None


def find_pattern_naive(c: CyclicColouring, spec: PatternSpec) -> APWitness | None:
    if not c.is_total:
        raise ValueError("naive search needs a total colouring; use find_pattern_partial")
    # on a total colouring "not blue" is "red" and "not red" is "blue"
    return _naive(c.colours, spec, BLUE, RED)


def find_pattern_partial(c: CyclicColouring, spec: PatternSpec) -> APWitness | None:
    """Naive scan where the first ``a`` terms must not be blue and the last ``b`` not red."""
    return _naive(c.colours, spec, BLUE, RED)


# ---------------------------------------------------------------- orbit engine


_FAR = np.iinfo(np.int64).max // 4


def _cyclic_runs(ok: np.ndarray) -> np.ndarray:
    """For each row (a cycle) and position j, the number of consecutive ``ok``
    cells starting at j going forward; a huge value when the whole row is ok."""
    rows, n = ok.shape
    doubled = np.concatenate([ok, ok], axis=1)
    pos = np.where(doubled, _FAR, np.arange(2 * n, dtype=np.int64))
    nxt = np.minimum.accumulate(pos[:, ::-1], axis=1)[:, ::-1]
    return nxt[:, :n] - np.arange(n, dtype=np.int64)


def _cycle_hits(first_ok: np.ndarray, last_ok: np.ndarray, a: int, b: int) -> np.ndarray:
    """Positions j of each cycle word where ``a`` first-ok cells are followed by ``b`` last-ok cells."""
    hits = np.ones(first_ok.shape, dtype=bool)
    if a:
        hits &= _cyclic_runs(first_ok) >= a
    if b:
        hits &= np.roll(_cyclic_runs(last_ok), -a, axis=1) >= b
    return hits


def _orbit_scan(first_ok: np.ndarray, last_ok: np.ndarray, spec: PatternSpec, ds: Iterable[int]):
    """Yield ``(d, min_start or None)`` for each difference in ascending order."""
    p = first_ok.shape[0]
    j = np.arange(p, dtype=np.int64)
    rows_per_batch = max(1, _BATCH_CELLS // (2 * p))
    batch: list[int] = []

    def flush():
        d_arr = np.array(batch, dtype=np.int64)
        idx = (d_arr[:, None] * j[None, :]) % p
        hits = _cycle_hits(first_ok[idx], last_ok[idx], spec.a, spec.b)
        starts = np.where(hits, idx, p).min(axis=1)
        for d, s in zip(batch, starts.tolist()):
            yield d, (s if s < p else None)
        batch.clear()

    for d in ds:
        g = gcd(d, p)
        if g == 1:
            batch.append(d)
            if len(batch) >= rows_per_batch:
                yield from flush()
            continue
        if batch:
            yield from flush()
        # d splits Z/pZ into g cosets r + <d>, each a cycle of length p/g
        idx = (np.arange(g, dtype=np.int64)[:, None] + np.arange(p // g, dtype=np.int64)[None, :] * d) % p
        hits = _cycle_hits(first_ok[idx], last_ok[idx], spec.a, spec.b)
        s = int(np.where(hits, idx, p).min())
        yield d, (s if s < p else None)
    if batch:
        yield from flush()


def _orbit_first(c: CyclicColouring, spec: PatternSpec, ds: Iterable[int]) -> tuple[APWitness | None, int]:
    first_ok, last_ok = c._masks()
    scanned = 0
    for d, start in _orbit_scan(first_ok, last_ok, spec, ds):
        scanned += c.p
        if start is not None:
            return APWitness(start, d, spec), scanned
    return None, scanned


def find_pattern_orbit(c: CyclicColouring, spec: PatternSpec) -> APWitness | None:
    if not c.is_total:
        raise ValueError("orbit search needs a total colouring")
    return _orbit_first(c, spec, range(1, c.p))[0]


def find_all_differences(c: CyclicColouring, spec: PatternSpec) -> dict[int, int]:
    """Every difference with a witness, mapped to its smallest start."""
    first_ok, last_ok = c._masks()
    return {d: s for d, s in _orbit_scan(first_ok, last_ok, spec, range(1, c.p)) if s is not None}


@dataclass(frozen=True)
class Certificate:
    p: int
    pattern: PatternSpec
    verified: bool
    counterexample: APWitness | None
    pairs_scanned: int
    partial: bool = False

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "a": self.pattern.a,
            "b": self.pattern.b,
            "verified": self.verified,
            "counterexample": self.counterexample.to_dict() if self.counterexample else None,
            "pairs_scanned": self.pairs_scanned,
            "semantics": "partial" if self.partial else "full",
        }


def verify_no_pattern(c: CyclicColouring, spec: PatternSpec, *, allow_partial: bool = False) -> Certificate:
    """Exhaustively certify that ``c`` has no ``spec``-progression for any ``d != 0``.

    Partial colourings are refused unless ``allow_partial``; they are then
    searched under the not-blue / not-red semantics.
    """
    if not c.is_total and not allow_partial:
        raise ValueError("colouring has unresolved residues; pass allow_partial=True")
    witness, scanned = _orbit_first(c, spec, range(1, c.p))
    return Certificate(c.p, spec, witness is None, witness, scanned, partial=not c.is_total)


def check_witness(c: CyclicColouring, w: APWitness) -> bool:
    """Direct check of a witness under the not-blue / not-red semantics."""
    if w.d % c.p == 0:
        return False
    for i, x in enumerate(w.elements(c.p)):
        if c.colours[x] == (BLUE if i < w.pattern.a else RED):
            return False
    return True


# ---------------------------------------------------------------- random empirics


def make_rng(seed: int) -> np.random.Generator:
    """The single documented generator: numpy PCG64 seeded with a 64-bit integer."""
    return np.random.Generator(np.random.PCG64(seed))


def _as_fraction(delta) -> Fraction:
    return Fraction(str(delta)) if isinstance(delta, float) else Fraction(delta)


def min_class_size(p: int, delta) -> int:
    return ceil(_as_fraction(delta) * p)


def validate_findability_params(p: int, spec: PatternSpec, delta) -> int:
    if p < 2:
        raise ValueError("modulus must be at least 2")
    need = min_class_size(p, delta)
    if need < 1:
        raise ValueError(f"delta*p must be at least 1 (p={p}, delta={delta})")
    if 2 * need > p:
        raise ValueError(f"both colour classes cannot have size >= {need} when p={p}")
    if spec.length > p:
        raise ValueError(f"pattern length {spec.length} exceeds p={p}")
    return need


def random_colouring(rng: np.random.Generator, p: int, need: int) -> CyclicColouring:
    """Uniform colouring conditioned on both classes having at least ``need`` elements."""
    while True:
        bits = rng.integers(0, 2, size=p)
        reds = int(bits.sum())
        if reds >= need and p - reds >= need:
            return CyclicColouring("".join(RED if x else BLUE for x in bits.tolist()))


@dataclass
class FindabilityRow:
    p: int
    trials: int
    with_witness: int
    counterexamples: list[CyclicColouring] = field(default_factory=list)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.with_witness, self.trials) if self.trials else Fraction(0)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "trials": self.trials,
            "with_witness": self.with_witness,
            "fraction": f"{self.fraction.numerator}/{self.fraction.denominator}",
            "witness_free": len(self.counterexamples),
        }


@dataclass
class FindabilityReport:
    pattern: PatternSpec
    delta: Fraction
    seed: int
    rows: list[FindabilityRow]
    references: list[tuple[str, Certificate]] = field(default_factory=list)

    @property
    def all_found(self) -> bool:
        return all(r.with_witness == r.trials for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "pattern": {"a": self.pattern.a, "b": self.pattern.b},
            "delta": f"{self.delta.numerator}/{self.delta.denominator}",
            "seed": self.seed,
            "generator": "numpy.PCG64",
            "rows": [r.to_dict() for r in self.rows],
            "references": [dict(name=name, **cert.to_dict()) for name, cert in self.references],
        }


def empirical_findability(
    p_list: Sequence[int],
    spec: PatternSpec,
    trials: int,
    delta,
    seed: int,
    references: Sequence[tuple[str, CyclicColouring]] = (),
) -> FindabilityReport:
    """Search random dense colourings for ``spec`` and collect the witness-free ones.

    ``references`` are known colourings (e.g. induced constructions) that are
    verified and reported alongside the random sample.
    """
    if trials < 0:
        raise ValueError("trials must be non-negative")
    needs = [validate_findability_params(p, spec, delta) for p in p_list]
    rng = make_rng(seed)
    rows = []
    for p, need in zip(p_list, needs):
        row = FindabilityRow(p, trials, 0)
        for _ in range(trials):
            c = random_colouring(rng, p, need)
            if find_pattern_orbit(c, spec) is None:
                row.counterexamples.append(c)
            else:
                row.with_witness += 1
        rows.append(row)
    refs = [(name, verify_no_pattern(c, spec, allow_partial=True)) for name, c in references]
    return FindabilityReport(spec, _as_fraction(delta), seed, rows, refs)
