"""Doubly dispersive channel: sampling, time-domain application, DAFT-domain forms.

Delays are integer sample counts and Doppler shifts are normalized to the
subcarrier spacing (nu = f_d * N * T_s), so a path contributes
gain * s[n - l] * exp(2j*pi*nu*n/N).  Path gains absorb the delay-dependent
phase exp(-2j*pi*nu*l/N) at sampling time, which makes the time response
start at the first received sample of each echo.

Two receive-side matrix forms are provided.  The operator form builds the
exact end-to-end subcarrier coupling matrix from FFTs of the circularized
time response.  The closed form evaluates the same matrix entrywise from
the Dirichlet kernel, which is what the sparsity and eavesdropper-SINR
analysis rest on.  They agree to machine precision and tests pin that.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .daft import FrameParams, SignalBlock, chirp_diag
from .exceptions import ContractViolation
from .keystream import C2Schedule

__all__ = [
    "PathSpec",
    "ChannelRealization",
    "sample_channel",
    "apply_channel",
    "awgn",
    "EffectiveChannel",
    "effective_channel",
    "effective_channel_closed_form",
    "coupling_kernel",
]


@dataclass(frozen=True)
class PathSpec:
    """One propagation path: complex gain, integer delay, normalized Doppler."""

    gain: complex
    delay: int
    doppler: float

    def __post_init__(self):
        if self.delay < 0 or self.delay != int(self.delay):
            raise ContractViolation(f"delay must be a nonnegative integer, got {self.delay}")
        if not np.isfinite(self.doppler):
            raise ContractViolation("doppler must be finite")


@dataclass(frozen=True)
class ChannelRealization:
    paths: tuple[PathSpec, ...]
    label: str = ""

    def __post_init__(self):
        if not self.paths:
            raise ContractViolation("a realization needs at least one path")

    @property
    def max_delay(self) -> int:
        return max(p.delay for p in self.paths)


def sample_channel(
    path_count: int,
    alpha_max: float,
    rng: np.random.Generator,
    *,
    n: int,
    integer_doppler: bool = False,
    label: str = "",
) -> ChannelRealization:
    """Draw one Rayleigh multipath realization with Jakes-distributed Doppler.

    Path i sits at delay i, its Doppler is alpha_max * cos(theta) with theta
    uniform on [-pi, pi], and gains are i.i.d. CN(0, 1/path_count) so the
    average channel energy is one regardless of the path count.
    """
    if path_count < 1:
        raise ContractViolation("path_count must be positive")
    if path_count > n:
        raise ContractViolation("more paths than samples in a frame")
    if alpha_max < 0:
        raise ContractViolation("alpha_max must be nonnegative")
    theta = rng.uniform(-np.pi, np.pi, size=path_count)
    nu = alpha_max * np.cos(theta)
    if integer_doppler:
        nu = np.rint(nu)
    scale = np.sqrt(0.5 / path_count)
    h = scale * (rng.standard_normal(path_count) + 1j * rng.standard_normal(path_count))
    delays = np.arange(path_count)
    gains = h * np.exp(-2j * np.pi * nu * delays / n)
    paths = tuple(
        PathSpec(gain=complex(g), delay=int(l), doppler=float(v))
        for g, l, v in zip(gains, delays, nu)
    )
    return ChannelRealization(paths=paths, label=label)


def awgn(rng: np.random.Generator, size: int, sigma2: float) -> np.ndarray:
    """Circularly symmetric complex Gaussian noise with total variance sigma2."""
    if sigma2 < 0:
        raise ContractViolation("noise variance must be nonnegative")
    if sigma2 == 0.0:
        return np.zeros(size, dtype=np.complex128)
    scale = np.sqrt(sigma2 / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def apply_channel(
    s: SignalBlock,
    realization: ChannelRealization,
    rng: np.random.Generator | None,
    sigma2: float,
) -> SignalBlock:
    """Push a prefixed frame through the channel by direct time-domain convolution.

    Works on the whole prefixed block so prefix contamination is physical,
    not modeled.  The longest path delay must fit inside the prefix.
    """
    if not s.has_prefix:
        raise ContractViolation("apply_channel expects a prefixed block")
    if realization.max_delay > s.prefix_len:
        raise ContractViolation(
            f"path delay {realization.max_delay} exceeds prefix length {s.prefix_len}"
        )
    n = s.n
    total = s.samples.size
    # sample clock: prefix samples sit at negative indices
    t = np.arange(total, dtype=np.float64) - s.prefix_len
    out = np.zeros(total, dtype=np.complex128)
    for p in realization.paths:
        shifted = np.zeros(total, dtype=np.complex128)
        if p.delay:
            shifted[p.delay :] = s.samples[: total - p.delay]
        else:
            shifted[:] = s.samples
        out += p.gain * shifted * np.exp(2j * np.pi * p.doppler * t / n)
    if sigma2 > 0.0:
        if rng is None:
            raise ContractViolation("noise requested but no generator supplied")
        out += awgn(rng, total, sigma2)
    return SignalBlock(out, prefix_len=s.prefix_len)


def _time_domain_matrix(realization: ChannelRealization, params: FrameParams) -> np.ndarray:
    """Equivalent circular matrix acting on the prefix-free transmit block.

    The chirp-periodic prefix turns each delayed echo into a circular shift
    with an extra unit phasor on the rows that wrap, so the end-to-end map
    from prefix-free input to prefix-free output is exactly circular.
    """
    n = params.n
    rows = np.arange(n)
    mat = np.zeros((n, n), dtype=np.complex128)
    for p in realization.paths:
        cols = (rows - p.delay) % n
        vals = p.gain * np.exp(2j * np.pi * p.doppler * rows / n)
        if p.delay:
            wrap = rows < p.delay
            phase = np.mod(params.c1 * (n * n - 2.0 * n * (p.delay - rows[wrap])), 1.0)
            vals = vals.astype(np.complex128)
            vals[wrap] *= np.exp(-2j * np.pi * phase)
        mat[rows, cols] += vals
    return mat


@dataclass(frozen=True)
class EffectiveChannel:
    """Subcarrier-domain coupling matrix together with which receiver it models."""

    matrix: np.ndarray
    variant: str = "bob"
    meta: dict = field(default_factory=dict, compare=False)


def effective_channel(
    realization: ChannelRealization,
    params: FrameParams,
    sched_rx: C2Schedule,
    sched_tx: C2Schedule | None = None,
) -> EffectiveChannel:
    """End-to-end subcarrier coupling matrix, built by operator composition.

    ``sched_tx`` is the schedule that actually shaped the transmitted frame.
    Passing ``None`` models a receiver that does not undo the transmit
    scrambling at all: its symbol estimate targets the scrambled frame
    x * exp(2j*pi*c2_tx[q]*q**2), which is the eavesdropper's situation
    (her own front-end guess is hers to undo losslessly, so it drops out).
    """
    n = params.n
    if len(sched_rx) != n or (sched_tx is not None and len(sched_tx) != n):
        raise ContractViolation("schedule length must match the frame size")
    ht = _time_domain_matrix(realization, params)
    lam1 = chirp_diag(params.c1, n)
    work = lam1[:, None] * ht * np.conj(lam1)[None, :]
    work = np.fft.fft(work, axis=0, norm="ortho")
    work = np.fft.ifft(work, axis=1, norm="ortho")
    work = chirp_diag(sched_rx.values, n)[None, :].T * work
    if sched_tx is None:
        variant = "eve"
    else:
        work = work * np.conj(chirp_diag(sched_tx.values, n))[None, :]
        both_zero = not (np.any(sched_rx.values) or np.any(sched_tx.values))
        variant = "afdm" if both_zero else "bob"
    return EffectiveChannel(matrix=work, variant=variant)


def _dirichlet_sum(z: np.ndarray, n: int, tol: float = 1e-9) -> np.ndarray:
    """sum_{k=0}^{n-1} exp(-2j*pi*z*k/n), stable at the integer-z limit."""
    z = np.asarray(z, dtype=np.float64)
    frac = z - n * np.rint(z / n)
    near = np.abs(frac) < tol
    safe = np.where(near, 1.0, z)
    num = np.exp(-2j * np.pi * safe) - 1.0
    den = np.exp(-2j * np.pi * safe / n) - 1.0
    out = np.where(near, float(n), num / np.where(near, 1.0, den))
    return out


def coupling_kernel(p, q, nu: float, delay: int, params: FrameParams) -> np.ndarray:
    """Magnitude profile of the subcarrier coupling for one path.

    Row p couples to column q through a Dirichlet kernel centered where
    p - q - nu + 2*N*c1*delay is a multiple of N; with integer Doppler and
    2*N*c1 integer the kernel collapses to a single column per row.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    n = params.n
    z = p - q - nu + 2.0 * n * params.c1 * delay
    return _dirichlet_sum(z, n)


def effective_channel_closed_form(
    realization: ChannelRealization,
    params: FrameParams,
    sched_rx: C2Schedule,
    sched_tx: C2Schedule | None = None,
) -> EffectiveChannel:
    """Entrywise evaluation of the subcarrier coupling matrix.

    Per path:  H[p, q] = (1/N) * exp(2j*pi*(c1*l*l - q*l/N)) * D(p - q - nu + 2*N*c1*l)
    with D the length-N Dirichlet sum, then the receive schedule phasors on
    rows and the conjugate transmit schedule phasors on columns.
    """
    n = params.n
    if len(sched_rx) != n or (sched_tx is not None and len(sched_tx) != n):
        raise ContractViolation("schedule length must match the frame size")
    rows = np.arange(n, dtype=np.float64)[:, None]
    cols = np.arange(n, dtype=np.float64)[None, :]
    acc = np.zeros((n, n), dtype=np.complex128)
    for path in realization.paths:
        kernel = coupling_kernel(rows, cols, path.doppler, path.delay, params)
        # carrier-dependent phase from the delay passing through the chirps
        phase = np.mod(params.c1 * path.delay * path.delay - cols * path.delay / n, 1.0)
        acc += path.gain * np.exp(2j * np.pi * phase) * kernel / n
    acc = chirp_diag(sched_rx.values, n)[:, None] * acc
    if sched_tx is None:
        variant = "eve"
    else:
        acc = acc * np.conj(chirp_diag(sched_tx.values, n))[None, :]
        both_zero = not (np.any(sched_rx.values) or np.any(sched_tx.values))
        variant = "afdm" if both_zero else "bob"
    return EffectiveChannel(matrix=acc, variant=variant)
