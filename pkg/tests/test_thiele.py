import itertools
import math
import random
from fractions import Fraction

import pytest

from approvalties.errors import LimitExceededError
from approvalties.model import Election, make_weight_function, validate_weight_function
from approvalties.oracle import RuleSpec, oracle_winning_committees
from approvalties.scores import w_score
from approvalties.thiele import (
    enumerate_thiele_winning,
    thiele_count,
    thiele_optimum,
    thiele_unique,
)
from conftest import random_election


@pytest.fixture(params=["auto", "branch-and-bound"])
def method(request):
    return request.param


def test_optimum_examples(e1, method):
    pav = make_weight_function("pav", 2)
    cc = make_weight_function("cc", 2)
    assert thiele_optimum(e1, pav, 2, method) == (Fraction(7, 2), (0, 1))
    assert thiele_optimum(e1, cc, 2, method) == (3, (0, 1))


def test_optimum_full_committee(e1):
    av = make_weight_function("av", 3)
    score, committee = thiele_optimum(e1, av, 3)
    assert committee == (0, 1, 2)
    assert score == w_score(e1, av, committee)


def test_unique_examples(e1, method):
    pav = make_weight_function("pav", 2)
    cc = make_weight_function("cc", 2)
    report = thiele_unique(e1, pav, 2, method)
    assert report.is_unique and report.witnesses == ((0, 1),)
    assert report.optimum == Fraction(7, 2)
    report = thiele_unique(e1, cc, 2, method)
    assert report.verdict == "tied"
    assert report.witnesses == ((0, 1), (0, 2))
    assert report.optimum == 3


def test_unique_single_candidate():
    e = Election(1, [{0}])
    report = thiele_unique(e, make_weight_function("pav", 1), 1)
    assert report.is_unique and report.witnesses == ((0,),)


def test_count_examples(e1, method):
    assert thiele_count(e1, make_weight_function("cc", 2), 2, 100, method) == 3
    assert thiele_count(e1, make_weight_function("pav", 2), 2, 100, method) == 1


def test_count_full_symmetry():
    e = Election(5, [set(range(5))] * 3)
    pav = make_weight_function("pav", 3)
    assert thiele_count(e, pav, 3, 10**6) == math.comb(5, 3)


def test_count_limit(method):
    e = Election(6, [set(range(6))] * 2)
    pav = make_weight_function("pav", 3)
    with pytest.raises(LimitExceededError) as info:
        thiele_count(e, pav, 3, 5, method)
    assert info.value.at_least >= 6


def test_enumerate_examples(e1, method):
    cc = make_weight_function("cc", 2)
    pav = make_weight_function("pav", 2)
    assert enumerate_thiele_winning(e1, cc, 2, 10, method) == [(0, 1), (0, 2), (1, 2)]
    assert enumerate_thiele_winning(e1, pav, 2, 10, method) == [(0, 1)]


def test_enumerate_symmetric_pair():
    e = Election(2, [{0, 1}])
    av = make_weight_function("av", 1)
    assert enumerate_thiele_winning(e, av, 1, 10) == [(0,), (1,)]


def test_bad_arguments(e1):
    pav = make_weight_function("pav", 2)
    with pytest.raises(ValueError):
        thiele_optimum(e1, pav, 0)
    with pytest.raises(ValueError):
        thiele_optimum(e1, pav, 3)  # only two increments
    with pytest.raises(ValueError):
        thiele_optimum(e1, pav, 2, method="simplex")


def test_oracle_equivalence_both_methods():
    rng = random.Random(29)
    for _ in range(60):
        e = random_election(rng, max_m=7, max_n=9)
        k = rng.randint(1, e.num_candidates)
        tag = rng.choice(["cc", "pav", "av"])
        w = make_weight_function(tag, k)
        expected = oracle_winning_committees(RuleSpec("thiele", k, w), e)
        best = max(w_score(e, w, c) for c in itertools.combinations(range(e.num_candidates), k))
        for method in ("exhaustive", "branch-and-bound"):
            score, committee = thiele_optimum(e, w, k, method)
            assert score == best
            assert committee == min(expected)
            assert thiele_count(e, w, k, 10**6, method) == len(expected)
            enumerated = enumerate_thiele_winning(e, w, k, 10**6, method)
            assert set(enumerated) == expected
            assert all(w_score(e, w, c) == best for c in enumerated)
            report = thiele_unique(e, w, k, method)
            assert report.is_unique == (len(expected) == 1)
            assert report.optimum == best
            assert set(report.witnesses) <= expected


def test_non_enumerated_committees_score_strictly_less():
    rng = random.Random(31)
    for _ in range(20):
        e = random_election(rng, max_m=6, max_n=8)
        k = rng.randint(1, e.num_candidates)
        w = make_weight_function("pav", k)
        winners = set(enumerate_thiele_winning(e, w, k, 10**6))
        best, _ = thiele_optimum(e, w, k)
        for committee in itertools.combinations(range(e.num_candidates), k):
            if committee not in winners:
                assert w_score(e, w, committee) < best


def test_custom_weight_function():
    # 2-truncated AV: delta = (1, 1, 0); exercises the scaled-integer path.
    e = Election(4, [{0, 1, 2}, {0, 1}, {2, 3}, {3}])
    w = validate_weight_function([1, 1, 0])
    score, committee = thiele_optimum(e, w, 3)
    brute = max(
        w_score(e, w, c) for c in itertools.combinations(range(4), 3)
    )
    assert score == brute


def test_overflow_guard_falls_back_to_python_path():
    # Prime denominators blow the scaled-integer table past int64; the
    # dispatch must take the pure-Python exhaustive path and stay exact.
    from approvalties import thiele as thiele_module

    primes = [1000003, 1000033, 1000037, 1000039]
    increments = [Fraction(1)]
    for p in primes:
        last = increments[-1]
        increments.append(Fraction(last.numerator * (p - 1), last.denominator * p))
    w = validate_weight_function(increments)
    e = Election(6, [{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}, {1, 4}])
    table, _ = w.integer_table
    assert not thiele_module._numpy_safe(table, e.num_voters, e.num_candidates)
    expected = oracle_winning_committees(RuleSpec("thiele", 3, w), e)
    assert set(enumerate_thiele_winning(e, w, 3)) == expected


def test_python_fallback_matches_numpy():
    from approvalties import thiele as thiele_module

    rng = random.Random(37)
    for _ in range(20):
        e = random_election(rng, max_m=6, max_n=8)
        k = rng.randint(1, e.num_candidates)
        w = make_weight_function("pav", k)
        fast = thiele_module._exhaustive_numpy(e, w, k, collect_max=None)
        slow = thiele_module._exhaustive_python(e, w, k, collect_max=None)
        assert fast.scaled_best == slow.scaled_best
        assert fast.count == slow.count
        assert fast.committees == slow.committees
