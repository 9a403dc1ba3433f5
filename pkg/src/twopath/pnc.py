"""Relay-side many-to-one mapping and its destination-side inverse.

The relay cannot separate a source symbol from the superposed inter-relay
interference, so it forwards a network-coded image of the sum. The
destination, which already detected the interfering symbol one slot earlier,
inverts the code. The defining property is the round trip
g(x_r, f(x + x_r)) = x for every pair over the alphabet.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .constellation import BPSK, QPSK, Alphabet, sum_alphabet
from .errors import DomainError

_BPSK_REALS = (1.0, -1.0)
_BPSK_SUMS = (-2.0, 0.0, 2.0)


def f_bpsk(z) -> float:
    """Map a detected pairwise sum in {-2, 0, 2} to the symbol a relay forwards."""
    z = complex(z)
    if z.imag != 0.0 or z.real not in _BPSK_SUMS:
        raise DomainError(f"f_bpsk expects a sum in {{-2, 0, 2}}, got {z}")
    return 1.0 - abs(z.real)


def g_bpsk(x_r, fr) -> float:
    """Recover a source symbol from the stored relay symbol and its coded image."""
    x_r, fr = complex(x_r), complex(fr)
    for v in (x_r, fr):
        if v.imag != 0.0 or v.real not in _BPSK_REALS:
            raise DomainError(f"g_bpsk expects symbols in {{-1, +1}}, got {v}")
    return 1.0 - abs(x_r.real + fr.real)


def f_qpsk(z) -> complex:
    """Component-wise relay mapping: the in-phase and quadrature rails are
    independent binary rails, so the binary map applies to each."""
    z = complex(z)
    if z.real not in _BPSK_SUMS or z.imag not in _BPSK_SUMS:
        raise DomainError(f"f_qpsk expects a pairwise QPSK sum, got {z}")
    return complex(1.0 - abs(z.real), 1.0 - abs(z.imag))


def g_qpsk(x_r, fr) -> complex:
    """Component-wise destination demapping for QPSK."""
    x_r, fr = complex(x_r), complex(fr)
    for v in (x_r, fr):
        if abs(v.real) != 1.0 or abs(v.imag) != 1.0:
            raise DomainError(f"g_qpsk expects QPSK symbols, got {v}")
    return complex(
        g_bpsk(x_r.real, fr.real),
        g_bpsk(x_r.imag, fr.imag),
    )


@dataclass(frozen=True, eq=False)
class PncMapper:
    """Lookup-table realization of the relay map f and destination demap g.

    Detection emits exact alphabet values, so keying the tables on those exact
    values avoids any floating-point comparison hazards in the hot path.
    Constructing an instance re-verifies the round-trip identity exhaustively.
    """

    alphabet: Alphabet
    f_table: dict
    g_table: dict

    @classmethod
    def for_alphabet(cls, alphabet: Alphabet) -> "PncMapper":
        if alphabet.name == "BPSK":
            f_scalar, g_scalar = f_bpsk, g_bpsk
        elif alphabet.name == "QPSK":
            f_scalar, g_scalar = f_qpsk, g_qpsk
        else:
            raise DomainError(f"no relay mapping shipped for alphabet {alphabet.name}")
        sums, _ = sum_alphabet(alphabet)
        f_table = {complex(z): complex(f_scalar(z)) for z in sums.tolist()}
        g_table = {
            (complex(a), complex(b)): complex(g_scalar(a, b))
            for a, b in itertools.product(alphabet.points, repeat=2)
        }
        mapper = cls(alphabet=alphabet, f_table=f_table, g_table=g_table)
        mapper._verify_round_trip()
        return mapper

    def _verify_round_trip(self) -> None:
        for x, x_r in itertools.product(self.alphabet.points, repeat=2):
            fwd = self.f(complex(x) + complex(x_r))
            if self.g(x_r, fwd) != complex(x):
                raise DomainError(
                    f"round-trip identity broken for x={x}, x_r={x_r}: "
                    f"g({x_r}, {fwd}) != {x}"
                )

    def f(self, z) -> complex:
        try:
            return self.f_table[complex(z)]
        except KeyError:
            raise DomainError(f"{z} is not a valid pairwise sum for {self.alphabet.name}") from None

    def g(self, x_r, fr) -> complex:
        try:
            return self.g_table[(complex(x_r), complex(fr))]
        except KeyError:
            raise DomainError(
                f"({x_r}, {fr}) is not a valid symbol pair for {self.alphabet.name}"
            ) from None

    # Vectorized forms for the batched simulation paths. Inputs are exact
    # label arrays, so the arithmetic below reproduces the tables exactly
    # (asserted element-by-element in the test suite).
    def f_vec(self, sums: np.ndarray) -> np.ndarray:
        sums = np.asarray(sums, dtype=complex)
        if self.alphabet.name == "BPSK":
            return (1.0 - np.abs(sums.real)).astype(complex)
        return (1.0 - np.abs(sums.real)) + 1j * (1.0 - np.abs(sums.imag))

    def g_vec(self, x_r: np.ndarray, fr: np.ndarray) -> np.ndarray:
        x_r = np.asarray(x_r, dtype=complex)
        fr = np.asarray(fr, dtype=complex)
        if self.alphabet.name == "BPSK":
            return (1.0 - np.abs(x_r.real + fr.real)).astype(complex)
        return (1.0 - np.abs(x_r.real + fr.real)) + 1j * (1.0 - np.abs(x_r.imag + fr.imag))


def get_mapper(alphabet: Alphabet) -> PncMapper:
    if alphabet.name == "BPSK":
        return _BPSK_MAPPER
    if alphabet.name == "QPSK":
        return _QPSK_MAPPER
    return PncMapper.for_alphabet(alphabet)


_BPSK_MAPPER = PncMapper.for_alphabet(BPSK)
_QPSK_MAPPER = PncMapper.for_alphabet(QPSK)
