"""Transmit and receive chains of the scrambled-chirp waveform.

The transmitter synthesizes the frame with an inverse DAFT whose
subcarrier-domain chirp rate varies per subcarrier according to the
keystream schedule, then attaches the chirp-periodic prefix.  A receiver
holding the same schedule applies the matching analysis transform and sees
an ordinary AFDM link.  A receiver without it sees every symbol multiplied
by the unknown unit phasor exp(2j*pi*c2[q]*q**2), which is the entire
security mechanism: magnitudes, spectra, and noise statistics are
untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .daft import FrameParams, SignalBlock, add_cpp, chirp_diag, daft, idaft, remove_cpp
from .exceptions import ContractViolation
from .keystream import C2Schedule

__all__ = [
    "Constellation",
    "qpsk",
    "qam16",
    "constellation_by_name",
    "map_bits",
    "schedule_phases",
    "descramble",
    "se_afdm_modulate",
    "bob_front_end",
    "eve_front_end",
]


@dataclass(frozen=True)
class Constellation:
    """Unit-average-energy alphabet indexed by the integer value of its Gray label."""

    name: str
    points: np.ndarray
    bits_per_symbol: int


def qpsk() -> Constellation:
    """Gray QPSK:  00 -> (1+1j)/sqrt(2), 01 -> (-1+1j)/sqrt(2),
    11 -> (-1-1j)/sqrt(2), 10 -> (1-1j)/sqrt(2)."""
    points = np.array([1 + 1j, -1 + 1j, 1 - 1j, -1 - 1j], dtype=np.complex128) / np.sqrt(2.0)
    return Constellation("qpsk", points, 2)


def qam16() -> Constellation:
    """Square 16-QAM, Gray per axis, first bit pair on I and second on Q."""
    # per-axis Gray labels: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
    axis = np.array([-3.0, -1.0, 3.0, 1.0])
    idx = np.arange(16)
    points = (axis[idx >> 2] + 1j * axis[idx & 3]) / np.sqrt(10.0)
    return Constellation("qam16", points, 4)


_FACTORIES = {"qpsk": qpsk, "qam16": qam16}


def constellation_by_name(name: str) -> Constellation:
    try:
        return _FACTORIES[name]()
    except KeyError:
        raise ContractViolation(f"unknown modulation {name!r}; known: {sorted(_FACTORIES)}") from None


def map_bits(bits, spec: Constellation) -> np.ndarray:
    """Map a flat 0/1 vector onto symbols, MSB first within each label."""
    bits = np.asarray(bits)
    if bits.ndim != 1:
        raise ContractViolation("bit vector must be one-dimensional")
    if bits.size % spec.bits_per_symbol:
        raise ContractViolation(
            f"bit count {bits.size} is not a multiple of {spec.bits_per_symbol}"
        )
    if bits.size and not np.isin(bits, (0, 1)).all():
        raise ContractViolation("bits must be 0 or 1")
    groups = bits.reshape(-1, spec.bits_per_symbol).astype(np.int64)
    weights = 1 << np.arange(spec.bits_per_symbol - 1, -1, -1)
    return spec.points[groups @ weights]


def schedule_phases(sched: C2Schedule) -> np.ndarray:
    """Unit phasors exp(2j*pi*c2[q]*q**2) the schedule imprints on symbol q."""
    return chirp_diag(sched.values, len(sched), conjugate=True)


def descramble(x_hat: np.ndarray, guess: C2Schedule) -> np.ndarray:
    """Strip a (possibly wrong) schedule's phasors from a symbol estimate.

    With the exact transmit schedule this inverts the scrambling; with a
    guess it leaves the residual phasor exp(2j*pi*(c2_true - c2_guess)*q**2).
    """
    x_hat = np.asarray(x_hat, dtype=np.complex128)
    if x_hat.shape != (len(guess),):
        raise ContractViolation("estimate and schedule lengths differ")
    return x_hat * np.conj(schedule_phases(guess))


def _check_schedule(sched: C2Schedule, owner: str, params: FrameParams, who: str) -> None:
    if sched.owner != owner:
        raise ContractViolation(f"{who} needs a schedule owned by {owner!r}, got {sched.owner!r}")
    if len(sched) != params.n:
        raise ContractViolation(f"schedule length {len(sched)} != n = {params.n}")


def se_afdm_modulate(x: np.ndarray, params: FrameParams, sched: C2Schedule) -> SignalBlock:
    """Transmit chain: schedule-varied inverse DAFT plus chirp-periodic prefix.

    The prefix-free part of the output keeps the symbol energy exactly
    (the transform is unitary for any schedule).
    """
    _check_schedule(sched, "alice", params, "se_afdm_modulate")
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (params.n,):
        raise ContractViolation(f"symbol frame must have shape ({params.n},)")
    return add_cpp(idaft(x, params, sched.values), params)


def bob_front_end(r: SignalBlock, params: FrameParams, sched: C2Schedule) -> np.ndarray:
    """Synchronized receiver: strip the prefix, apply the matching analysis DAFT."""
    _check_schedule(sched, "bob", params, "bob_front_end")
    return daft(remove_cpp(r, params), params, sched.values)


def eve_front_end(r: SignalBlock, params: FrameParams, sched: C2Schedule) -> np.ndarray:
    """Eavesdropper front end: identical math, but with her own schedule guess.

    Whatever she applies here is known to her and folded into her channel
    matrix, so the guess itself carries no information loss; the loss is in
    the descrambling step afterwards.
    """
    _check_schedule(sched, "eve", params, "eve_front_end")
    return daft(remove_cpp(r, params), params, sched.values)
