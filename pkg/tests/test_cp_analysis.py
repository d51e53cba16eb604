import itertools
import random

import pytest
from hypothesis import given, settings

from affina.algebra_core import (
    Alphabet, Mode, Polynomial, length, length_one_objects, objects_up_to, parse_polynomial,
    tree, trees_up_to, var, words_up_to,
)
from affina.cp_analysis import (
    AffineLawViolation, FunctionOracle, MultidegreeMismatch, NotCongruencePreserving,
    SynthesisFailure, builtin_oracle, choose_tau, extract_multidegree, mirror_tree,
    polynomials_equal_on_letters, refute_cp, synthesize,
)
from affina.rewriting import FirstLetter, LengthMod, LetterCount, Principal, TotalLength, in_ct

from strategies import random_tree_poly, random_word_poly, tree_polys, word_polys

AB = Alphabet("ab")
A1 = Alphabet("a")


def oracle(p, alphabet=AB):
    return FunctionOracle.from_polynomial(p, alphabet)


def test_reverse_has_degree_one():
    prof = extract_multidegree(builtin_oracle("reverse", Mode.WORD, AB))
    assert prof.multidegree == (1,) and prof.base == 0


def test_length_law_violation_detected():
    f = FunctionOracle(1, Mode.WORD, AB, lambda w: "a" if w == "a" else "")
    with pytest.raises(AffineLawViolation):
        extract_multidegree(f)


def test_word_mode_needs_two_letters():
    with pytest.raises(ValueError):
        extract_multidegree(FunctionOracle(1, Mode.WORD, A1, lambda w: w))


def test_tree_multidegree():
    p = parse_polynomial("((x1.a).(x2.x1))", Mode.TREE)
    prof = extract_multidegree(oracle(p, A1))
    assert prof.multidegree == (2, 1) and prof.base == 1


def test_reverse_synthesis_fails_with_short_witness():
    with pytest.raises(SynthesisFailure) as err:
        synthesize(builtin_oracle("reverse", Mode.WORD, AB))
    witness = err.value.witness
    assert witness is not None and all(length(u) <= 2 for u in witness)
    f = builtin_oracle("reverse", Mode.WORD, AB)
    assert err.value.candidate(*witness) != f(*witness)


def test_mirror_synthesis_fails():
    with pytest.raises(NotCongruencePreserving):
        synthesize(builtin_oracle("mirror", Mode.TREE, Alphabet("ab")))


def test_mirror_refuted_by_principal_pair():
    f = builtin_oracle("mirror", Mode.TREE, Alphabet("abcd"))
    cong = Principal(tree("(a.(b.b))"), tree("a"))
    w = refute_cp(f, [cong])
    assert w is not None and w.certified
    assert cong.related(w.args[0], w.other_args[0])
    assert cong.related(*w.images) is False
    assert mirror_tree(tree("(a.(b.b))")) == tree("((b.b).a)")


def test_sort_letters_refuted_by_first_letter():
    f = builtin_oracle("sort-letters", Mode.WORD, AB)
    w = refute_cp(f, [FirstLetter()])
    assert w is not None
    fl = FirstLetter()
    assert all(fl.related(x, y) for x, y in zip(w.args, w.other_args))
    assert not fl.related(*w.images)
    assert w.images == (f(*w.args), f(*w.other_args))


def test_refute_skips_inapplicable_families(caplog):
    f = builtin_oracle("reverse", Mode.WORD, AB)
    from affina.rewriting import LeafSideCount
    assert refute_cp(f, [LeafSideCount("left")], budget=100) is None
    assert "skipping" in caplog.text


def test_refute_respects_budget():
    p = Polynomial("a" + var(1) + var(2), 2)
    f = oracle(p)
    assert refute_cp(f, [TotalLength()], budget=50) is None
    assert f.queries == 50


@settings(max_examples=25)
@given(word_polys())
def test_polynomial_oracles_survive_refutation(p):
    fams = [TotalLength(), LetterCount("a"), FirstLetter(), LengthMod(2), Principal("aababb", "a")]
    assert refute_cp(oracle(p), fams, budget=500, bound=2) is None


@settings(max_examples=60)
@given(word_polys())
def test_word_round_trip(p):
    assert synthesize(oracle(p)) == p


@settings(max_examples=60)
@given(tree_polys("a"))
def test_tree_round_trip_single_letter(p):
    assert synthesize(oracle(p, A1)) == p


@given(word_polys())
def test_multidegree_consistency_words(p):
    assert extract_multidegree(oracle(p)).multidegree == p.multidegree


@given(tree_polys("ab"))
def test_multidegree_consistency_trees(p):
    prof = extract_multidegree(oracle(p, Alphabet("ab")))
    assert prof.multidegree == p.multidegree
    assert prof.base == length(p.body) - p.degree


@given(word_polys())
def test_choose_tau_conditions(p):
    f = oracle(p)
    tau = choose_tau(f, p.degree)
    assert in_ct(tau)
    assert length(tau) > length(f(*["a"] * p.arity))
    assert length(tau) >= 2 * p.degree + 4


def _signature_groups(bodies, arity, mode, alphabet):
    ones = length_one_objects(mode, alphabet)
    tuples = list(itertools.product(ones, repeat=arity))
    groups = {}
    for body in bodies:
        p = Polynomial(body, arity)
        if p.degree == 0 and arity:
            continue
        sig = (p.multidegree, tuple(p(*t) for t in tuples))
        groups.setdefault(sig, []).append(p)
    return groups


@pytest.mark.parametrize("arity", [1, 2])
def test_letter_agreement_forces_equality_words(arity):
    symbols = ["a", "b"] + [var(i + 1) for i in range(arity)]
    groups = _signature_groups(words_up_to(symbols, 7), arity, Mode.WORD, AB)
    assert len(groups) > 1000
    assert all(len(g) == 1 for g in groups.values())


def test_letter_agreement_forces_equality_trees():
    bodies = trees_up_to(["a", var(1)], 7)
    groups = _signature_groups(bodies, 1, Mode.TREE, A1)
    assert len(groups) > 100
    assert all(len(g) == 1 for g in groups.values())


def test_polynomials_equal_on_letters():
    p = Polynomial("a" + var(1) + "b", 1)
    q = Polynomial("ab" + var(1), 1)
    assert polynomials_equal_on_letters(p, p, AB)
    assert not polynomials_equal_on_letters(p, q, AB)
    with pytest.raises(MultidegreeMismatch):
        polynomials_equal_on_letters(p, Polynomial(var(1) * 2, 1), AB)


def test_seeded_round_trip_mixed_alphabet():
    rng = random.Random(7)
    for _ in range(10):
        p = random_tree_poly(rng, "ab")
        assert synthesize(oracle(p, Alphabet("ab"))) == p
        w = random_word_poly(rng, "abc")
        assert synthesize(oracle(w, Alphabet("abc")), verify_len=3) == w
