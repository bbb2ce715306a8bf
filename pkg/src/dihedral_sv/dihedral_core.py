"""Exact arithmetic in the dihedral group D_N with N = 2**n, the hidden
reflection oracle, and a brute-force state-vector Fourier sampler.

Elements are pairs ``(a, b)`` standing for ``x^a y^b``; the product law is
``(a1, b1)(a2, b2) = (a1 + (-1)^b1 a2, b1 ^ b2)``.
"""

from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InformationLeak, WidthTooLarge

FULL_SIMULATION_MAX_WIDTH = 10

_audit = contextvars.ContextVar("dihedral_sv_audit", default=False)
_quantum_scope = contextvars.ContextVar("dihedral_sv_quantum_scope", default=False)


@contextlib.contextmanager
def audit_mode(enabled: bool = True):
    """While active, reading ``HiddenInstance.s`` outside a quantum scope raises."""
    token = _audit.set(enabled)
    try:
        yield
    finally:
        _audit.reset(token)


@contextlib.contextmanager
def quantum_scope():
    """Marks code that models the quantum device (and may touch the slope)."""
    token = _quantum_scope.set(True)
    try:
        yield
    finally:
        _quantum_scope.reset(token)


class DihedralElement(NamedTuple):
    a: int
    b: int


@dataclass(frozen=True)
class HiddenInstance:
    """The secret: register width ``n`` and slope ``s`` mod ``2**n``."""

    n: int
    _s: int = field(repr=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"register width must be >= 2, got {self.n}")
        if not 0 <= self._s < (1 << self.n):
            raise ValueError(f"slope {self._s} outside [0, 2^{self.n})")

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def s(self) -> int:
        if _audit.get() and not _quantum_scope.get():
            raise InformationLeak("hidden slope read outside the quantum boundary")
        return self._s


def validate(g: DihedralElement, N: int) -> DihedralElement:
    a, b = g
    if not (0 <= a < N and b in (0, 1)):
        raise ValueError(f"{g} is not an element of D_{N}")
    return DihedralElement(a, b)


def compose(g: DihedralElement, h: DihedralElement, N: int) -> DihedralElement:
    a1, b1 = g
    a2, b2 = h
    return DihedralElement((a1 - a2 if b1 else a1 + a2) % N, b1 ^ b2)


def inverse(g: DihedralElement, N: int) -> DihedralElement:
    a, b = g
    return DihedralElement(a, 1) if b else DihedralElement((-a) % N, 0)


def hidden_reflection(inst: HiddenInstance) -> DihedralElement:
    """The non-identity element ``x^s y`` of H."""
    with quantum_scope():
        return DihedralElement(inst.s, 1)


def hidden_f(g: DihedralElement, inst: HiddenInstance) -> int:
    """Coset label: ``f(a, 0) = a`` and ``f(a, 1) = s - a`` (mod N).

    Two elements share a label iff they lie in the same coset ``H g`` with
    ``H = {(0, 0), (s, 1)}``.
    """
    a, b = g
    if not b:
        return a % inst.N
    with quantum_scope():
        return (inst.s - a) % inst.N


class FourierSample(NamedTuple):
    k: int
    amplitudes: tuple[complex, complex]


def coset_fourier_sample(inst: HiddenInstance, rng: np.random.Generator) -> FourierSample:
    """Full state-vector run of one round of quantum Fourier sampling.

    Registers: rotation ``a`` (N values), reflection bit ``b``, and the oracle
    output register (N labels).  The oracle output is measured, leaving the
    two-element coset state ``|a, 0> + |s - a, 1>``.  The rotation coordinate of
    the ``b = 0`` branch is negated (a controlled permutation) so the coset reads
    ``|-a, 0> + |s - a, 1>``, and the Z_N Fourier transform is applied to the
    rotation register.  Measuring ``k`` leaves the reflection qubit in
    ``|0> + e^{2 pi i k s / N}|1>``, returned normalised with a real positive
    ``|0>`` amplitude.
    """
    if inst.n > FULL_SIMULATION_MAX_WIDTH:
        raise WidthTooLarge(f"full simulation supports n <= {FULL_SIMULATION_MAX_WIDTH}, got {inst.n}")
    N = inst.N
    a = np.arange(N)
    with quantum_scope():
        labels = np.stack([a, (inst.s - a) % N], axis=1)  # labels[a, b] = f(a, b)

    # Uniform superposition over D_N, entangled with the label register.
    state = np.zeros((N, 2, N), dtype=complex)
    state[a, 0, labels[:, 0]] = 1.0
    state[a, 1, labels[:, 1]] = 1.0
    state /= np.sqrt(2 * N)

    p_label = np.sum(np.abs(state) ** 2, axis=(0, 1))
    label = rng.choice(N, p=p_label / p_label.sum())
    coset = state[:, :, label] / np.sqrt(p_label[label])

    coset[:, 0] = coset[(-a) % N, 0]
    # Unitary DFT with kernel e^{+2 pi i a k / N}.
    spectrum = np.fft.ifft(coset, axis=0) * np.sqrt(N)

    p_k = np.sum(np.abs(spectrum) ** 2, axis=1)
    k = int(rng.choice(N, p=p_k / p_k.sum()))
    pair = spectrum[k] / np.sqrt(p_k[k])
    pair = pair * np.exp(-1j * np.angle(pair[0]))
    return FourierSample(k, (complex(pair[0]), complex(pair[1])))


def expected_phase_pair(k: int, inst: HiddenInstance) -> tuple[complex, complex]:
    """Reference amplitudes ``(1, e^{2 pi i k s / N}) / sqrt 2``."""
    with quantum_scope():
        phase = np.exp(2j * np.pi * ((k * inst.s) % inst.N) / inst.N)
    r = 1 / np.sqrt(2)
    return complex(r), complex(r * phase)
