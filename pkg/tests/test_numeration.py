import pytest
from hypothesis import given, strategies as st

import oracles
from mahler.numeration import (
    ZECKENDORF,
    Base,
    DigitWord,
    NumerationError,
    canonical,
    delta,
    digit_add,
    digit_sub,
    fib,
    floor_phi,
    floor_phi2,
    format_word,
    has_adjacent_ones,
    lam,
    pad,
    parse_word,
    phi,
    phi2_via_floor,
    phi_iter,
    phi_preimage,
    phi_via_floor,
    support,
    value,
    word_alphabet,
)

BASE2 = Base(2)
BASE3 = Base(3)

# whole-table reproductions; phi appends a zero digit to the canonical
# expansion, so these pin the numeration itself
PHI_TABLE = (0, 2, 3, 5, 7, 8, 10, 11, 13, 15, 16, 18, 20, 21)
PHI2_PLUS_ONE = (1, 4, 6, 9, 12, 14, 17, 19, 22, 25, 27, 30, 33, 35)


def test_fib_table():
    assert [fib(i) for i in range(-2, 9)] == [0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55]
    with pytest.raises(NumerationError):
        fib(-3)


def test_kind_validation():
    with pytest.raises(NumerationError):
        Base(1)
    with pytest.raises(NumerationError):
        Base("2")
    assert word_alphabet(BASE3) == (0, 1, 2)
    assert word_alphabet(ZECKENDORF) == (0, 1)


def test_canonical_examples():
    assert canonical(0).digits == (0,)
    assert str(canonical(7)) == "1010"
    assert str(canonical(100, BASE2)) == "1100100"
    assert str(canonical(100, BASE3)) == "10201"
    with pytest.raises(NumerationError):
        canonical(-1)
    with pytest.raises(NumerationError):
        canonical(1.5)


def test_value_on_arbitrary_digits():
    assert value((1, -1, -1)) == 0  # 3 - 2 - 1
    assert value((1, 1)) == 3  # non-canonical, still defined
    assert value((0, 0, 1, 0, 1), BASE2) == 5
    assert value((), BASE2) == 0 and value(()) == 0


def test_phi_tables():
    assert tuple(phi(n) for n in range(14)) == PHI_TABLE
    assert tuple(phi_iter(n, 2) + 1 for n in range(14)) == PHI2_PLUS_ONE


def test_phi_iter_edges():
    assert phi_iter(5, 0) == 5
    assert phi_iter(1, 3) == phi(phi(phi(1)))
    with pytest.raises(NumerationError):
        phi_iter(1, -1)


def test_floor_formulas_against_decimal():
    for k in range(3000):
        assert floor_phi(k) == oracles.phi_floor(k)
        assert floor_phi2(k) == k + oracles.phi_floor(k)
    with pytest.raises(NumerationError):
        floor_phi(-1)


def test_phi_closed_forms():
    for n in range(3000):
        assert phi_via_floor(n) == phi(n)
        assert phi2_via_floor(n) == phi_iter(n, 2)


def test_phi_preimage():
    for n in range(300):
        assert phi_preimage(phi(n)) == n
        assert phi_preimage(phi_iter(n, 3), 3) == n
        assert phi_preimage(n, 0) == n
    assert phi_preimage(0, 7) == 0
    assert phi_preimage(1) is None  # canonical "1" has no trailing zero
    assert phi_preimage(4) is None  # "101"
    assert phi_preimage(3, 2) == 1  # "100" loses two zeros
    assert phi_preimage(2, 2) is None  # "10" is a single shift only
    with pytest.raises(NumerationError):
        phi_preimage(3, -1)


def test_lam():
    assert lam(0) == 0
    assert lam(4) == 2  # "101" -> "10"
    for n in range(300):
        assert lam(phi(n)) == n


def test_delta_range_and_oracle():
    for m in range(40):
        for n in range(40):
            d = delta(m, n)
            assert d in (-1, 0, 1)
            assert d == oracles.delta_ref(m, n)


def test_support():
    assert support(0) == frozenset()
    assert support(7) == frozenset({1, 3})  # 7 = 2 + 5
    for n in range(500):
        idx = support(n)
        assert sum(fib(i) for i in idx) == n
        assert all(i + 1 not in idx for i in idx)


def test_pad():
    w = pad(canonical(4), 6)
    assert w.digits == (0, 0, 0, 1, 0, 1)
    with pytest.raises(NumerationError):
        pad(canonical(4), 2)


def test_digit_add_sub():
    assert digit_add((1, 0), (0, 1)).digits == (1, 1)
    assert digit_sub((1, 0), (0, 1)).digits == (1, -1)
    with pytest.raises(NumerationError):
        digit_add((1,), (1, 0))


def test_parse_and_format_word():
    assert str(parse_word("10100")) == "10100"
    assert parse_word("1,0,-1").digits == (1, 0, -1)
    assert format_word((1, 0, -1)) == "1,0,-1"
    assert parse_word("").digits == ()
    for bad in ("1x", "1 -1", "a", "-"):
        with pytest.raises(NumerationError):
            parse_word(bad)


def test_digit_word_alphabet_enforced():
    with pytest.raises(NumerationError):
        DigitWord((2,), frozenset((0, 1)))
    assert has_adjacent_ones((0, 1, 1))
    assert not has_adjacent_ones((1, 0, 1))


@given(st.integers(0, 100000), st.sampled_from([BASE2, BASE3, ZECKENDORF]))
def test_canonical_round_trip(n, kind):
    w = canonical(n, kind)
    assert value(w, kind) == n
    if n > 0:
        assert w.digits[0] != 0


@given(st.integers(0, 100000))
def test_canonical_zeckendorf_is_greedy_and_clean(n):
    w = canonical(n)
    assert not has_adjacent_ones(w)
    assert str(w) == oracles.zeckendorf_greedy(n)


@st.composite
def binary_words(draw, max_len=14):
    return tuple(draw(st.lists(st.integers(0, 1), max_size=max_len)))


@given(binary_words(), st.integers(0, 1))
def test_append_digit_law(w, b):
    # for EVERY 0/1 word, canonical or not: [wb] = phi([w]) + b
    assert value(w + (b,)) == phi(value(w)) + b


@given(binary_words())
def test_canonical_of_value_strips_leading_zeros(w):
    cleaned = list(w)
    for i in range(1, len(cleaned)):
        if cleaned[i - 1] == 1 and cleaned[i] == 1:
            cleaned[i] = 0  # make it adjacent-ones-free
    n = value(tuple(cleaned))
    trimmed = tuple(cleaned[next(
        (i for i, d in enumerate(cleaned) if d), len(cleaned)):])
    assert canonical(n).digits == (trimmed if trimmed else (0,))


@given(st.integers(0, 5000), st.integers(0, 5000))
def test_delta_pointwise(m, n):
    assert delta(m, n) == phi(m + n) - phi(m) - phi(n)
