import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sumsetlab.bitwindow import BitWindow, decode, encode
from sumsetlab.errors import FormatError, InputError, OutOfWindowError


def windows(max_size=300):
    return st.tuples(st.integers(0, 200), st.lists(st.booleans(), min_size=1, max_size=max_size)).map(
        lambda t: BitWindow.from_bools(t[0], np.array(t[1], dtype=bool)))


def test_rejects_bad_frames():
    with pytest.raises(InputError):
        BitWindow.empty(5, 5)
    with pytest.raises(InputError):
        BitWindow.empty(-1, 3)


def test_membership_outside_window_is_an_error():
    w = BitWindow.from_members(10, 20, [12])
    assert 12 in w and 13 not in w
    with pytest.raises(OutOfWindowError):
        9 in w
    with pytest.raises(OutOfWindowError):
        20 in w


def test_tail_bits_stay_clear():
    w = BitWindow.full(0, 70)
    assert w.count() == 70
    assert int(w.words[-1]) == (1 << 6) - 1
    assert w.complement().count() == 0


@given(windows(), st.data())
def test_count_and_bools_match_numpy(w, data):
    bools = w.to_bools()
    a = data.draw(st.integers(w.lo, w.hi))
    b = data.draw(st.integers(a, w.hi))
    assert w.count(a, b) == int(bools[a - w.lo:b - w.lo].sum())
    assert np.array_equal(w.to_bools(a, b), bools[a - w.lo:b - w.lo])
    assert w.members().tolist() == (np.flatnonzero(bools) + w.lo).tolist()


@given(st.lists(st.booleans(), min_size=1, max_size=200), st.lists(st.booleans(), min_size=1, max_size=200))
def test_set_algebra(xs, ys):
    n = min(len(xs), len(ys))
    x, y = np.array(xs[:n]), np.array(ys[:n])
    A, B = BitWindow.from_bools(3, x), BitWindow.from_bools(3, y)
    assert np.array_equal((A | B).to_bools(), x | y)
    assert np.array_equal((A & B).to_bools(), x & y)
    assert np.array_equal((A - B).to_bools(), x & ~y)
    assert np.array_equal((A ^ B).to_bools(), x ^ y)
    assert np.array_equal(A.complement().to_bools(), ~x)
    assert (A & B).issubset(A)


@given(windows())
def test_reversed_words(w):
    rev = BitWindow(0, w.size, w.reversed_words())
    assert np.array_equal(rev.to_bools(), w.to_bools()[::-1])


@given(windows(), st.data())
def test_dense_zero_extends(w, data):
    a = data.draw(st.integers(0, w.hi + 5))
    b = data.draw(st.integers(a, w.hi + 80))
    want = np.array([int(w.lo <= m < w.hi and m in w) for m in range(a, b)], dtype=np.uint8)
    assert np.array_equal(w.dense(a, b), want)


@settings(max_examples=50)
@given(windows(600))
def test_encode_decode_round_trip(w):
    assert decode(encode(w)) == w


def test_concat_and_slice():
    w = BitWindow.from_members(0, 200, [0, 63, 64, 130, 199])
    parts = [w.slice(0, 64), w.slice(64, 131), w.slice(131, 200)]
    assert BitWindow.concat(parts) == w


def test_decode_errors():
    data = encode(BitWindow.full(0, 20))
    with pytest.raises(FormatError):
        decode(data[:-1])
    with pytest.raises(FormatError):
        decode(b"BW2 0 20\n" + data.split(b"\n", 1)[1])
    with pytest.raises(FormatError):
        decode(data[:-1] + b"\xff")  # padding bits beyond hi set


def test_file_round_trip(tmp_path):
    w = BitWindow.from_members(5, 1000, range(5, 1000, 7))
    w.save(tmp_path / "w.bw1")
    assert BitWindow.load(tmp_path / "w.bw1") == w
    assert (tmp_path / "w.bw1").read_bytes().startswith(b"BW1 5 1000\n")


def test_large_window_encoding_size():
    data = encode(BitWindow.full(0, 10**8))
    assert len(data) <= 12.6e6
