"""Relay mapping f, destination demapping g, and the round-trip identity."""

import itertools

import numpy as np
import pytest

from twopath import BPSK, QPSK, DomainError, f_bpsk, f_qpsk, g_bpsk, g_qpsk, get_mapper
from twopath.constellation import sum_alphabet


def test_f_bpsk_values():
    assert f_bpsk(2) == -1
    assert f_bpsk(0) == 1
    assert f_bpsk(-2) == -1


@pytest.mark.parametrize("bad", [1, -1, 3, 2j, 0.5])
def test_f_bpsk_domain(bad):
    with pytest.raises(DomainError):
        f_bpsk(bad)


def test_g_bpsk_values():
    assert g_bpsk(1, -1) == 1
    assert g_bpsk(-1, 1) == 1
    assert g_bpsk(1, 1) == -1
    assert g_bpsk(-1, -1) == -1
    # one explicit round trip: x = 1 through interference x_r = -1
    assert g_bpsk(-1, f_bpsk(1 + (-1))) == 1


@pytest.mark.parametrize("bad", [(0, 1), (1, 2), (1j, 1)])
def test_g_bpsk_domain(bad):
    with pytest.raises(DomainError):
        g_bpsk(*bad)


def test_bpsk_round_trip_exhaustive():
    for x, x_r in itertools.product((1, -1), repeat=2):
        assert g_bpsk(x_r, f_bpsk(x + x_r)) == x


def test_f_qpsk_fixture_values():
    # worked-sequence fixtures, confirmed by the exhaustive round-trip oracle
    assert f_qpsk(2 + 2j) == -1 - 1j
    assert f_qpsk(0) == 1 + 1j
    assert f_qpsk(2 - 2j) == -1 - 1j
    assert f_qpsk(2) == -1 + 1j


def test_f_qpsk_domain():
    with pytest.raises(DomainError):
        f_qpsk(1 + 1j)
    with pytest.raises(DomainError):
        f_qpsk(4)


def test_qpsk_round_trip_exhaustive():
    # the identity g(x_r, f(x + x_r)) = x over all 16 ordered pairs is the
    # defining property; it also pins down the fixture values above
    for x, x_r in itertools.product(QPSK.points, repeat=2):
        assert g_qpsk(x_r, f_qpsk(x + x_r)) == x


def test_g_qpsk_fixture_values():
    assert g_qpsk(1 + 1j, -1 - 1j) == 1 + 1j
    assert g_qpsk(1 - 1j, -1 + 1j) == 1 + 1j


def test_qpsk_componentwise_decomposition():
    values, _ = sum_alphabet(QPSK)
    for z in values:
        z = complex(z)
        want = complex(f_bpsk(z.real), f_bpsk(z.imag))
        assert f_qpsk(z) == want


@pytest.mark.parametrize("alphabet", [BPSK, QPSK])
def test_f_closure(alphabet):
    values, _ = sum_alphabet(alphabet)
    for z in values:
        assert f_qpsk(z) in QPSK.points if alphabet is QPSK else f_bpsk(complex(z).real) in (1, -1)


@pytest.mark.parametrize("alphabet", [BPSK, QPSK])
def test_mapper_tables_match_formulas(alphabet):
    mapper = get_mapper(alphabet)
    values, _ = sum_alphabet(alphabet)
    f_scalar = f_bpsk if alphabet is BPSK else f_qpsk
    g_scalar = g_bpsk if alphabet is BPSK else g_qpsk
    for z in values:
        assert mapper.f(z) == complex(f_scalar(z))
    for a, b in itertools.product(alphabet.points, repeat=2):
        assert mapper.g(a, b) == complex(g_scalar(a, b))


@pytest.mark.parametrize("alphabet", [BPSK, QPSK])
def test_mapper_vectorized_matches_tables(alphabet):
    mapper = get_mapper(alphabet)
    values, _ = sum_alphabet(alphabet)
    got = mapper.f_vec(values)
    for z, fz in zip(values, got):
        assert complex(fz) == mapper.f(z)
    pairs = np.array(list(itertools.product(alphabet.points, repeat=2)), dtype=complex)
    got_g = mapper.g_vec(pairs[:, 0], pairs[:, 1])
    for (a, b), gz in zip(pairs, got_g):
        assert complex(gz) == mapper.g(a, b)


def test_mapper_domain_errors():
    mapper = get_mapper(BPSK)
    with pytest.raises(DomainError):
        mapper.f(3)
    with pytest.raises(DomainError):
        mapper.g(0, 1)


def test_mapper_round_trip_all_alphabets():
    for alphabet in (BPSK, QPSK):
        mapper = get_mapper(alphabet)
        for x, x_r in itertools.product(alphabet.points, repeat=2):
            assert mapper.g(x_r, mapper.f(complex(x) + complex(x_r))) == complex(x)
