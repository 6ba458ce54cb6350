from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aplab.exact import Colour, locate
from aplab.fractal import iterate
from aplab.search import (
    APWitness,
    CyclicColouring,
    PatternSpec,
    check_witness,
    empirical_findability,
    find_all_differences,
    find_pattern_naive,
    find_pattern_orbit,
    find_pattern_partial,
    induce,
    make_rng,
    min_class_size,
    random_colouring,
    validate_findability_params,
    verify_no_pattern,
)

R, B = Colour.RED, Colour.BLUE


def brute_force(colours, a, b):
    """Plain restatement of the search used as an oracle: smallest d, then smallest start."""
    p = len(colours)
    want = "R" * a + "B" * b
    for d in range(1, p):
        for s in range(p):
            if "".join(colours[(s + i * d) % p] for i in range(a + b)) == want:
                return s, d
    return None


def test_pattern_spec_validation():
    assert PatternSpec(2, 3).length == 5
    assert str(PatternSpec(1, 0)) == "(1,0)"
    for a, b in [(0, 0), (-1, 2), (2, -1)]:
        with pytest.raises(ValueError):
            PatternSpec(a, b)


def test_colouring_validation_and_counts():
    c = CyclicColouring("RRUB")
    assert c.p == 4 and c.unresolved == 1 and not c.is_total
    assert c.count(R) == 2 and c.count(B) == 1
    assert c.filled(B).colours == "RRBB" and c.filled(B).fill is B
    with pytest.raises(ValueError):
        CyclicColouring("")
    with pytest.raises(ValueError):
        CyclicColouring("RXB")


@pytest.mark.parametrize(
    "p, expected",
    [(5, "RRRBR"), (7, "RRRRBBR"), (2, "RB"), (3, "RBB")],
)
def test_induce_ap1414_small(p, expected):
    assert induce("ap1414", p, 12).colours == expected


def test_induce_ap3x30000_small_all_blue():
    assert induce("ap3x30000", 5, 8).colours == "BBBBB"


@pytest.mark.parametrize("p, depth", [(31, 3), (53, 4), (101, 3)])
def test_induce_matches_located_level(p, depth):
    # a residue resolved at depth k has the colour of its interval in c_k
    cfg = iterate("ap1414", depth)
    got = induce("ap1414", p, depth).colours
    for i, ch in enumerate(got):
        ivl = locate(cfg, F(i, p))
        assert ch == (ivl.colour.value if ivl.is_coloured else "U")


def test_induce_errors_and_fill():
    with pytest.raises(ValueError):
        induce("ap1414", 1)
    with pytest.raises(ValueError):
        induce("ap1414", 7, -1)
    partial = induce("ap1414", 101, 2)
    assert partial.unresolved > 0
    assert partial.filled(R).colours == induce("ap1414", 101, 2, R).colours


def test_unresolved_nonincreasing_in_depth():
    counts = [induce("ap1414", 211, k).unresolved for k in range(0, 9)]
    assert all(x >= y for x, y in zip(counts, counts[1:]))
    assert counts[0] > counts[-1]


def test_naive_and_orbit_examples():
    c = CyclicColouring("RRBBB")
    assert find_pattern_naive(c, PatternSpec(1, 1)) == APWitness(1, 1, PatternSpec(1, 1))
    assert find_pattern_orbit(c, PatternSpec(2, 2)) == APWitness(0, 1, PatternSpec(2, 2))
    assert find_pattern_orbit(c, PatternSpec(2, 3)) == APWitness(0, 1, PatternSpec(2, 3))
    assert find_pattern_orbit(c, PatternSpec(3, 1)) is None
    # RRRBR: three reds followed by a blue along d=1
    c = CyclicColouring("RRRBR")
    assert find_pattern_orbit(c, PatternSpec(3, 1)) == APWitness(0, 1, PatternSpec(3, 1))
    assert find_pattern_orbit(c, PatternSpec(1, 2)) is None


def test_single_colour_and_two_point():
    assert find_pattern_orbit(CyclicColouring("B" * 7), PatternSpec(1, 0)) is None
    assert find_pattern_orbit(CyclicColouring("B" * 7), PatternSpec(0, 3)) == APWitness(0, 1, PatternSpec(0, 3))
    assert find_pattern_orbit(CyclicColouring("RB"), PatternSpec(1, 1)) == APWitness(0, 1, PatternSpec(1, 1))


def test_search_refuses_partial():
    c = CyclicColouring("RUB")
    with pytest.raises(ValueError):
        find_pattern_naive(c, PatternSpec(1, 1))
    with pytest.raises(ValueError):
        find_pattern_orbit(c, PatternSpec(1, 1))
    with pytest.raises(ValueError):
        verify_no_pattern(c, PatternSpec(1, 1))


def test_partial_semantics():
    # U is neither blue nor red, so either role accepts it
    c = CyclicColouring("RUB")
    w = find_pattern_partial(c, PatternSpec(2, 1))
    assert w == APWitness(0, 1, PatternSpec(2, 1)) and check_witness(c, w)
    # start 1 would end on R; start 2 wraps R then B
    assert find_pattern_partial(CyclicColouring("BUR"), PatternSpec(1, 1)) == APWitness(2, 1, PatternSpec(1, 1))
    cert = verify_no_pattern(c, PatternSpec(2, 1), allow_partial=True)
    assert not cert.verified and cert.partial and cert.counterexample == w


def _random_colourings(n, seed, pmax=61):
    rng = make_rng(seed)
    out = []
    for _ in range(n):
        p = int(rng.integers(2, pmax + 1))
        bits = rng.integers(0, 2, size=p)
        out.append("".join("R" if x else "B" for x in bits.tolist()))
    return out


@pytest.mark.parametrize("seed", [1, 2])
def test_engines_agree_with_brute_force(seed):
    for s in _random_colourings(25, seed, pmax=30):
        c = CyclicColouring(s)
        for a in range(0, 4):
            for b in range(0, 4):
                if a + b == 0:
                    continue
                spec = PatternSpec(a, b)
                expected = brute_force(s, a, b)
                for w in (find_pattern_naive(c, spec), find_pattern_orbit(c, spec), find_pattern_partial(c, spec)):
                    assert (None if w is None else (w.start, w.d)) == expected


def test_composite_moduli_use_cosets():
    # d=2 on Z/6Z walks two cosets; the even residues alone hold RRB
    c = CyclicColouring("RBRBBB")
    assert brute_force(c.colours, 2, 1) == (0, 2)
    assert find_pattern_orbit(c, PatternSpec(2, 1)) == APWitness(0, 2, PatternSpec(2, 1))


def test_find_all_differences_matches_oracle():
    for s in _random_colourings(10, 5, pmax=40):
        c = CyclicColouring(s)
        spec = PatternSpec(2, 2)
        got = find_all_differences(c, spec)
        p = len(s)
        for d in range(1, p):
            starts = [st for st in range(p) if "".join(s[(st + i * d) % p] for i in range(4)) == "RRBB"]
            assert got.get(d) == (min(starts) if starts else None)


@settings(max_examples=60, deadline=None)
@given(st.text(alphabet="RB", min_size=2, max_size=25), st.integers(0, 3), st.integers(0, 3))
def test_sub_pattern_monotonicity(s, a, b):
    # an (a,b) witness contains an (a',b') witness for every a' <= a, b' <= b
    if a + b == 0:
        return
    c = CyclicColouring(s)
    if find_pattern_orbit(c, PatternSpec(a, b)) is None:
        return
    for a2 in range(a + 1):
        for b2 in range(b + 1):
            if a2 + b2:
                assert find_pattern_orbit(c, PatternSpec(a2, b2)) is not None


@settings(max_examples=60, deadline=None)
@given(st.text(alphabet="RB", min_size=2, max_size=25), st.integers(1, 3), st.integers(0, 3))
def test_witnesses_check_out(s, a, b):
    c = CyclicColouring(s)
    w = find_pattern_orbit(c, PatternSpec(a, b))
    if w is not None:
        assert check_witness(c, w)
        assert all(s[x] == "R" for x in w.elements(c.p)[:a])


def test_verify_no_pattern_examples():
    c = induce("ap1414", 199, 10, B)
    cert = verify_no_pattern(c, PatternSpec(14, 14))
    assert cert.verified and cert.counterexample is None and cert.pairs_scanned == 199 * 198
    cert = verify_no_pattern(c, PatternSpec(1, 1))
    assert not cert.verified and check_witness(c, cert.counterexample)
    assert verify_no_pattern(CyclicColouring("B" * 7), PatternSpec(1, 0)).verified
    assert cert.to_dict()["semantics"] == "full"


def test_check_witness_rejects_zero_difference():
    c = CyclicColouring("RB")
    assert not check_witness(c, APWitness(0, 2, PatternSpec(1, 1)))


def test_colouring_io_round_trip():
    c = induce("ap1414", 53, 3)
    text = c.to_text()
    assert text == f"53\n{c.colours}\n"
    assert CyclicColouring.from_text(text).colours == c.colours
    back = CyclicColouring.from_text(c.filled(R).to_json())
    assert back == c.filled(R)
    with pytest.raises(ValueError):
        CyclicColouring.from_text("5\nRRB\n")
    with pytest.raises(ValueError):
        CyclicColouring.from_text("RRB")


def test_witness_dict_round_trip():
    w = APWitness(3, 7, PatternSpec(2, 5))
    assert w.to_dict() == {"start": 3, "d": 7, "a": 2, "b": 5}
    assert APWitness.from_dict(w.to_dict()) == w
    assert w.elements(11) == [3, 10, 6, 2, 9, 5, 1]


def test_min_class_size_and_validation():
    assert min_class_size(101, 0.3) == 31
    assert min_class_size(100, F(3, 10)) == 30
    assert validate_findability_params(101, PatternSpec(2, 3), 0.3) == 31
    with pytest.raises(ValueError):
        validate_findability_params(2, PatternSpec(2, 3), 0.3)
    with pytest.raises(ValueError):
        validate_findability_params(101, PatternSpec(1, 1), 0.6)
    with pytest.raises(ValueError):
        validate_findability_params(101, PatternSpec(1, 1), 0)


def test_random_colouring_respects_density():
    rng = make_rng(7)
    for _ in range(50):
        c = random_colouring(rng, 41, 18)
        assert c.count(R) >= 18 and c.count(B) >= 18


def test_empirical_findability_deterministic():
    rep1 = empirical_findability([53], PatternSpec(2, 2), 30, 0.3, seed=4)
    rep2 = empirical_findability([53], PatternSpec(2, 2), 30, 0.3, seed=4)
    assert rep1.to_dict() == rep2.to_dict()
    assert rep1.to_dict()["generator"] == "numpy.PCG64"


def test_empirical_findability_trivial_cases():
    rep = empirical_findability([3], PatternSpec(1, 1), 20, F(1, 3), seed=0)
    assert rep.all_found and rep.rows[0].fraction == 1
    rep = empirical_findability([2], PatternSpec(1, 1), 5, F(1, 2), seed=0)
    assert rep.rows[0].with_witness == 5


def test_empirical_findability_with_reference():
    ref = induce("ap1414", 101, 12, B)
    rep = empirical_findability([101], PatternSpec(14, 14), 10, 0.49, seed=1, references=[("ap1414", ref)])
    (name, cert), = rep.references
    assert name == "ap1414" and cert.verified
    # dense random colourings are extremely unlikely to hold 14 reds then 14 blues
    assert rep.rows[0].with_witness + len(rep.rows[0].counterexamples) == 10


def test_ap3x30000_density_near_limit():
    c = induce("ap3x30000", 4999, 8, B)
    assert abs(F(c.count(R), c.p) - F(2, 95)) < F(2, 100)
    # the red residues form an honest minority
    assert 0 < c.count(R) < c.p // 10


def test_orbit_batches_cover_all_differences():
    # more differences than one batch holds at small p exercises batch flushing
    rng = np.random.default_rng(0)
    s = "".join(rng.choice(["R", "B"], size=97).tolist())
    c = CyclicColouring(s)
    assert len(find_all_differences(c, PatternSpec(1, 1))) == 96
