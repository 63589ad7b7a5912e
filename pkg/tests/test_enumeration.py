from collections import Counter
from fractions import Fraction

import pytest

from gridcover.blocks import POINT_BLOCK, Block
from gridcover.cover import Cover, verify_cover
from gridcover.enumeration import (
    ClassRegistry,
    EmptyClassError,
    RecursionNotWellFounded,
    counting_sequence,
    evaluate_term_numeric,
    exact_distribution,
    functional_equations,
    rule_term,
    sample_uniform,
)
from gridcover.perms import Basis, avoiders, avoids
from gridcover.rules import EMPTY_RULE, Rule, count_rule

P = POINT_BLOCK
D = Block.of("12")
I = Block.of("21")


def cover(basis, *rules):
    return Cover(Basis.parse(basis), [EMPTY_RULE, *rules], 5)


A = Block.of("231")
CATALAN = cover("231", Rule.from_cells({(0, 0): A, (1, 2): P, (2, 1): A}))
E2 = cover(
    "123_231",
    Rule.from_cells({(0, 1): P, (1, 0): Block.of("123_231")}),
    Rule.from_cells({(0, 1): P, (1, 0): D, (2, 3): P, (3, 2): D}),
)
F = Block.of("123_132_213")
FIB = cover("123_132_213", Rule.from_cells({(0, 1): P, (1, 0): F}), Rule.from_cells({(0, 1): P, (1, 2): P, (2, 0): F}))
B132 = Block.of("132_4231")
C132_4231 = cover(
    "132_4231",
    Rule.from_cells({(0, 0): B132, (1, 1): P}),
    Rule.from_cells({(0, 3): P, (1, 2): D, (1, 4): I, (2, 0): Block.of("132_231"), (3, 1): P}),
)
H4 = Block.of("1324_1342_3124_3142")
H4_COVER = cover(
    "1324_1342_3124_3142",
    Rule.from_cells({(1, 0): P, (0, 1): H4}),
    Rule.from_cells({(0, 5): H4, (1, 1): P, (2, 0): D, (2, 2): I, (2, 4): D, (3, 3): P}),
)
ALL = [CATALAN, E2, FIB, C132_4231, H4_COVER]


@pytest.mark.parametrize("c", ALL, ids=lambda c: str(c.basis))
def test_hand_covers_verify(c):
    assert verify_cover(c, c.basis.max_length + 4).ok


def test_catalan_sequence():
    assert counting_sequence(CATALAN, 7) == [1, 1, 2, 5, 14, 42, 132, 429]


def test_e2_sequence():
    assert counting_sequence(E2, 10) == [1, 1, 2, 4, 7, 11, 16, 22, 29, 37, 46]


@pytest.mark.parametrize("c", ALL, ids=lambda c: str(c.basis))
def test_sequence_matches_avoiders(c):
    assert counting_sequence(c, 9) == avoiders(c.basis, 9).counts


def test_sequence_json():
    seq = counting_sequence(CATALAN, 4)
    assert seq.to_json() == "[1, 1, 2, 5, 14]"
    assert seq.comma_line() == "1, 1, 2, 5, 14"


def test_fibonacci_recurrence():
    a = counting_sequence(FIB, 10)
    for n in range(2, 11):
        assert a[n] == a[n - 1] + a[n - 2]


def test_equation_catalan():
    assert functional_equations(CATALAN).render() == "A = 1 + x·A·A"


def test_equation_e2():
    eqs = functional_equations(E2, root_name="E2")
    assert eqs.render() == "E2 = 1 + x·E2 + x²·D·D"
    assert set(eqs.external) == {"D"}


def test_equation_h4():
    assert functional_equations(H4_COVER, root_name="H4").render() == "H4 = 1 + x·H4 + x²·H4/(1−3x)"


def test_equation_fib():
    assert functional_equations(FIB, root_name="F").render() == "F = 1 + x·F + x²·F"


def test_nested_registry_equations():
    # a registered cover for a block adds its own equation instead of an external series
    outer = cover("1234_1243_1324_1342_1423_1432_2134_2143_2314_2341_2413_2431_3124_3142_3214_3241_4123_4132_4213")
    outer.rules = [Rule.from_cells({(0, 0): F}), Rule.from_cells({(0, 0): P, (1, 1): P, (2, 1): P}),
                   Rule.from_cells({(0, 1): P, (1, 0): P, (2, 2): P})]
    assert verify_cover(outer, 8).ok
    reg = ClassRegistry([FIB])
    eqs = functional_equations(outer, reg, names={F: "F"}, root_name="H1")
    assert set(eqs.equations) == {"H1", "F"}
    assert not eqs.external
    seq = counting_sequence(outer, 10, reg)
    fib = counting_sequence(FIB, 10)
    assert seq[3] == 6
    assert all(seq[n] == fib[n] for n in range(4, 11))


@pytest.mark.parametrize("c", ALL, ids=lambda c: str(c.basis))
def test_terms_sum_to_sequence(c):
    seq = counting_sequence(c, 9)
    eqs = functional_equations(c)
    root = Block.of(c.basis)
    for n in range(10):
        total = sum(evaluate_term_numeric(t, n, overrides={root: seq.terms}) for t in eqs.equations[eqs.root])
        assert total == seq[n]


def test_term_examples():
    mixing = rule_term(Rule.from_cells({(0, 0): P, (1, 1): D, (1, 2): I}), {D: "D", I: "I"})
    assert mixing.render() == "x/(1−2x)"
    assert evaluate_term_numeric(mixing, 3) == 4
    dd = rule_term(E2.rules[2], {D: "D"})
    assert dd.render() == "x²·D·D"
    assert evaluate_term_numeric(dd, 4) == 3
    assert evaluate_term_numeric(dd, 1) == 0


def test_point_class_line():
    b = Block.of("132_213")
    r = Rule.from_cells({(0, 0): P, (1, 0): b})
    t = rule_term(r, {b: "B"})
    assert t.render() == "x·∂(x·B)"
    assert [evaluate_term_numeric(t, n) for n in range(2, 10)] == [n * 2 ** (n - 2) for n in range(2, 10)]


def test_explicit_sum_fallback():
    # two points in one column and one of them also in a row with a class: not a single line
    r = Rule.from_cells({(0, 0): P, (0, 1): P, (1, 1): Block.of("132_213")})
    t = rule_term(r, {Block.of("132_213"): "B"})
    assert t.explicit
    assert [evaluate_term_numeric(t, n) for n in range(8)] == [count_rule(r, n) for n in range(8)]


def test_non_wellfounded():
    bad = Cover(Basis.parse("231"), [EMPTY_RULE, Rule.from_cells({(0, 0): A})], 5)
    with pytest.raises(RecursionNotWellFounded, match="Av\\(231\\)"):
        counting_sequence(bad, 4)


def test_sampler_support_231():
    draws = sample_uniform(CATALAN, 4, seed=1, count=10_000)
    assert all(avoids(p, A.basis.patterns) for p in draws)
    assert set(map(tuple, draws)) == set(avoiders(A.basis, 4).of_length(4))


def test_sampler_trivial_cases():
    assert [tuple(p) for p in sample_uniform(CATALAN, 0, count=3)] == [()] * 3
    dec = Cover(Basis.parse("12"), [EMPTY_RULE, Rule.from_cells({(0, 1): P, (1, 0): D})], 4)
    assert {tuple(p) for p in sample_uniform(dec, 5, count=20)} == {(5, 4, 3, 2, 1)}


def test_sampler_seed_determinism():
    a = sample_uniform(C132_4231, 7, seed=42, count=20)
    b = sample_uniform(C132_4231, 7, seed=42, count=20)
    c = sample_uniform(C132_4231, 7, seed=43, count=20)
    assert a == b and a != c


def test_sampler_empty_class():
    fin = Cover(Basis.parse("12_21"), [EMPTY_RULE, Rule.from_cells({(0, 0): P})], 3)
    with pytest.raises(EmptyClassError):
        sample_uniform(fin, 3)


@pytest.mark.parametrize("c", [CATALAN, C132_4231, E2, H4_COVER], ids=lambda c: str(c.basis))
def test_exact_probabilities_uniform(c):
    for n in range(6):
        dist = exact_distribution(c, n)
        level = avoiders(c.basis, n).of_length(n)
        assert set(dist) == set(level)
        assert all(q == Fraction(1, len(level)) for q in dist.values())


def test_empirical_frequencies_close():
    # loose frequency bound on top of the exact check (expected 1000 each)
    draws = Counter(map(tuple, sample_uniform(C132_4231, 4, seed=3, count=13_000)))
    assert len(draws) == 13
    assert all(800 < v < 1200 for v in draws.values())
