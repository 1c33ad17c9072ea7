import numpy as np
import pytest

from doublewell.fock import (
    FockState,
    dimension,
    enumerate_basis,
    one_level_basis,
)

from oracles import brute_force_basis


def test_dimension_values():
    assert dimension(0) == 1
    assert dimension(10) == 286          # 13*12*11/6
    assert dimension(20) == 1771         # 23*22*21/6


def test_dimension_matches_brute_force():
    for N in range(9):
        assert dimension(N) == len(brute_force_basis(N))


def test_dimension_is_exact_integer_arithmetic():
    # large N must not round through floats
    assert dimension(10_000) == 10_003 * 10_002 * 10_001 // 6


def test_dimension_rejects_negative():
    with pytest.raises(ValueError):
        dimension(-1)


def test_enumerate_covers_all_states_once():
    for N in (0, 1, 2, 3, 5, 8):
        basis = enumerate_basis(N)
        tuples = [(s.nL0, s.nR0, s.nL1, s.nR1) for s in basis]
        assert len(tuples) == dimension(N)
        assert set(tuples) == brute_force_basis(N)
        assert len(set(tuples)) == len(tuples)


def test_n2_canonical_order_by_hand():
    expected = [
        (0, 2, 0, 0), (1, 1, 0, 0), (2, 0, 0, 0),           # M=0
        (0, 1, 0, 1), (1, 0, 0, 1), (0, 1, 1, 0), (1, 0, 1, 0),   # M=1
        (0, 0, 0, 2), (0, 0, 1, 1), (0, 0, 2, 0),           # M=2
    ]
    basis = enumerate_basis(2)
    assert [(s.nL0, s.nR0, s.nL1, s.nR1) for s in basis] == expected
    assert basis.index_of(FockState(1, 1, 0, 0)) == 1
    assert basis.index_of(FockState(0, 0, 0, 2)) == 7


def test_n20_block_boundaries():
    basis = enumerate_basis(20)
    assert basis.state_at(0) == FockState(0, 20, 0, 0)
    assert basis.state_at(20) == FockState(20, 0, 0, 0)
    assert basis.state_at(21).excited == 1
    assert basis.state_at(60).excited == 1
    assert basis.state_at(61).excited == 2
    assert basis.block_start(1) == 21
    assert basis.block_start(2) == 61


def test_block_boundaries_formula():
    for N in (3, 7, 12, 20, 30):
        basis = enumerate_basis(N)
        cum = 0
        for M in range(N + 1):
            assert basis.block_start(M) == cum
            cum += (M + 1) * (N - M + 1)
        assert cum == basis.dim


def test_index_state_round_trip():
    for N in (0, 1, 2, 5, 8):
        basis = enumerate_basis(N)
        for i, s in enumerate(basis):
            assert basis.index_of(s) == i
            assert basis.state_at(i) == s


def test_round_trip_random_sample_large_n():
    basis = enumerate_basis(25)
    rng = np.random.default_rng(7)
    for i in rng.integers(0, basis.dim, size=200):
        assert basis.index_of(basis.state_at(int(i))) == int(i)


def test_index_of_rejects_wrong_total():
    basis = enumerate_basis(4)
    with pytest.raises(ValueError):
        basis.index_of(FockState(1, 1, 1, 0))
    assert basis.try_index(FockState(1, 1, 1, 0)) is None


def test_state_at_rejects_out_of_range():
    basis = enumerate_basis(3)
    with pytest.raises(IndexError):
        basis.state_at(basis.dim)
    with pytest.raises(IndexError):
        basis.state_at(-1)


def test_negative_occupation_rejected():
    with pytest.raises(ValueError):
        FockState(-1, 3, 0, 0)


def test_one_level_basis():
    basis = one_level_basis(6)
    assert basis.dim == 7
    assert all(s.excited == 0 for s in basis)
    assert basis.one_level
    assert basis.try_index(FockState(0, 5, 1, 0)) is None
    assert basis.index_of(FockState(3, 3, 0, 0)) == 3


def test_cap_enforced_and_overridable():
    with pytest.raises(ValueError):
        enumerate_basis(41)
    basis = enumerate_basis(41, max_n=41)
    assert basis.dim == dimension(41)


def test_mirrored_involution():
    s = FockState(2, 1, 0, 3)
    assert s.mirrored() == FockState(1, 2, 3, 0)
    assert s.mirrored().mirrored() == s
