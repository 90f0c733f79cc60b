"""The generator must match the published xorshift64* sequence bit for bit.

Reference values below were produced by a separate straight-line
transcription of the algorithm (shift triple 12/25/27, multiplier
0x2545F4914F6CDD1D), kept independent of the implementation under test.
"""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from evsite.rng import XorShift64Star

REFERENCE = {
    1: [0x47E4CE4B896CDD1D, 0xABCFA6A8E079651D, 0xB9D10D8FEB731F57,
        0x4DB418A0BB1B019D, 0x0E6199B04D5AA600],
    42: [0x56CE4AB7719BA3A0, 0xC841EB53EBBB2DDA, 0xCA466BE0C9980276,
         0xF1ACC7334A7B70DF, 0xC3AF4DD7FB900A06],
    0: [0x0D83B3E29A21487A, 0x54C44C79F1FE9D67, 0xA845F342007A0E78],
    (1 << 64) - 1: [0xF92CC9E5C6000000, 0x8FF484D8FD1EAEE3, 0x346C95F3326FABC6],
}


@pytest.mark.parametrize("seed", sorted(REFERENCE))
def test_matches_reference_stream(seed):
    rng = XorShift64Star(seed)
    assert [rng.next_u64() for _ in REFERENCE[seed]] == REFERENCE[seed]


def test_zero_seed_is_usable():
    # seed 0 would be a fixed point of the raw recurrence; the substitute
    # constant must kick the generator into a real orbit
    rng = XorShift64Star(0)
    values = {rng.next_u64() for _ in range(100)}
    assert len(values) == 100


def test_known_floats():
    rng = XorShift64Star(7)
    got = [rng.next_float() for _ in range(3)]
    assert got == [0.8202466665411988, 0.9282901565044228, 0.08934959275158794]


@given(st.integers(min_value=0, max_value=(1 << 64) - 1))
def test_float_range(seed):
    rng = XorShift64Star(seed)
    for _ in range(20):
        v = rng.next_float()
        assert 0.0 <= v < 1.0


@given(st.integers(min_value=0, max_value=(1 << 64) - 1),
       st.integers(min_value=1, max_value=1000))
def test_next_below_bounds(seed, n):
    rng = XorShift64Star(seed)
    for _ in range(20):
        assert 0 <= rng.next_below(n) < n


def test_uniform_respects_interval():
    rng = XorShift64Star(3)
    for _ in range(100):
        v = rng.uniform(-2.5, 7.5)
        assert -2.5 <= v < 7.5


@given(st.integers(min_value=0, max_value=(1 << 64) - 1), st.integers(0, 50))
def test_shuffle_is_a_permutation(seed, n):
    items = list(range(n))
    shuffled = XorShift64Star(seed).shuffle(list(items))
    assert sorted(shuffled) == items


def test_shuffle_deterministic_per_seed():
    a = XorShift64Star(99).shuffle(list(range(200)))
    b = XorShift64Star(99).shuffle(list(range(200)))
    c = XorShift64Star(100).shuffle(list(range(200)))
    assert a == b
    assert a != c
