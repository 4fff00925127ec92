"""Monte Carlo experiment harness: configs, sweeps, CSV output.

Reproducibility contract: every trial owns a seed tree rooted at
SeedSequence(config.seed, spawn_key=(point_index, trial_index)), spawned
into eight child streams in a fixed order (data bits, keystream seed,
Bob channel, Bob noise, Eve channel, Eve noise, Eve guess, channel
estimation error).  Results therefore depend only on (seed, point, trial),
never on worker count or completion order, and error counts are summed as
integers before any division.

The plain-AFDM reference inside ``bob-vs-afdm-ber`` reuses the same
channel realization and the same noise vector as the scrambled frame (two
generators built from one child sequence replay identical draws), so the
comparison isolates the scrambling itself.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from importlib import metadata
from pathlib import Path

import numpy as np
import yaml

from .channel import apply_channel, effective_channel, sample_channel
from .daft import FrameParams
from .detection import demap, count_errors, mmse_equalize
from .exceptions import ConfigError
from .keystream import (
    DEFAULT_TAPS,
    C2Schedule,
    Codebook,
    Lfsr,
    build_codebook,
    generate_schedule,
    search_space_bits,
    zero_schedule,
)
from .sinr import SinrCurve, eve_sinr_curve
from .waveform import (
    Constellation,
    bob_front_end,
    constellation_by_name,
    descramble,
    eve_front_end,
    map_bits,
    se_afdm_modulate,
)

__all__ = [
    "SCENARIOS",
    "EVE_MODES",
    "ExperimentConfig",
    "TrialRecord",
    "run_scenario",
    "run_sinr_curve",
    "search_space_summary",
    "emit_csv",
    "read_csv",
    "wilson",
]

SCENARIOS = (
    "bob-vs-afdm-ber",
    "eve-ber",
    "csi-error-ber",
    "bias-sweep",
    "sinr-vs-c2max",
    "search-space",
)

MONTE_CARLO_SCENARIOS = SCENARIOS[:4]

EVE_MODES = ("zeros", "random", "biased")

try:
    _VERSION = metadata.version("seafdm")
except metadata.PackageNotFoundError:  # running from a source tree
    _VERSION = "0+unknown"

_SEED_POLICY = "SeedSequence(seed, spawn_key=(point_index, trial_index)).spawn(8)"


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: link geometry, adversary model, sweep, and budget.

    snr_db is the sweep axis for the BER scenarios; bias-sweep sweeps
    bias_values at snr_db[0] instead.  csi_error_var is the per-entry
    variance of the complex Gaussian error added to every receiver's
    channel estimate (zero means genie CSI).
    """

    scenario: str = "eve-ber"
    n: int = 64
    modulation: str = "qpsk"
    m: int = 4
    c2max: float = 4.88e-5
    paths: int = 3
    alpha_max: float = 2.0
    integer_doppler: bool = False
    ncp: int | None = None
    snr_db: tuple[float, ...] = (25.0,)
    trials: int = 200
    seed: int = 1
    eve_mode: str = "zeros"
    eve_bias: float = 0.0
    csi_error_var: float = 0.0
    workers: int = 1
    lfsr_taps: tuple[int, ...] = DEFAULT_TAPS
    bias_values: tuple[float, ...] = ()
    c2max_values: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "snr_db", _as_float_tuple(self.snr_db, "snr_db"))
        object.__setattr__(self, "bias_values", _as_float_tuple(self.bias_values, "bias_values", empty_ok=True))
        object.__setattr__(self, "c2max_values", _as_float_tuple(self.c2max_values, "c2max_values", empty_ok=True))
        object.__setattr__(self, "lfsr_taps", tuple(int(t) for t in self.lfsr_taps))
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; known: {SCENARIOS}")
        if self.eve_mode not in EVE_MODES:
            raise ConfigError(f"unknown eve_mode {self.eve_mode!r}; known: {EVE_MODES}")
        if self.n < 2:
            raise ConfigError("n must be at least 2")
        if self.paths < 1 or self.paths > self.n:
            raise ConfigError("paths must lie in [1, n]")
        if self.trials < 1:
            raise ConfigError("trials must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        if not self.snr_db:
            raise ConfigError("snr_db sweep must not be empty")
        if self.c2max < 0 or not np.isfinite(self.c2max):
            raise ConfigError("c2max must be finite and nonnegative")
        if self.eve_bias < 0:
            raise ConfigError("eve_bias must be nonnegative")
        if self.csi_error_var < 0:
            raise ConfigError("csi_error_var must be nonnegative")
        if self.scenario == "bias-sweep" and not self.bias_values:
            raise ConfigError("bias-sweep needs a nonempty bias_values list")
        if self.scenario == "csi-error-ber" and self.csi_error_var == 0.0:
            raise ConfigError("csi-error-ber needs csi_error_var > 0")
        # fail fast on geometry the properties would reject later
        self.frame_params
        self.codebook
        self.constellation

    @property
    def frame_params(self) -> FrameParams:
        ncp = self.ncp if self.ncp is not None else self.paths - 1
        try:
            return FrameParams.for_profile(self.n, self.alpha_max, ncp, self.modulation)
        except Exception as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def codebook(self) -> Codebook:
        try:
            return build_codebook(self.c2max, self.m)
        except Exception as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def constellation(self) -> Constellation:
        try:
            return constellation_by_name(self.modulation)
        except Exception as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError(f"config must be a mapping, got {type(raw).__name__}")
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        try:
            return cls(**raw)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        text = Path(path).read_text()
        raw = yaml.safe_load(text)
        if raw is None:
            raw = {}
        return cls.from_dict(raw)


def _as_float_tuple(value, name: str, empty_ok: bool = False) -> tuple[float, ...]:
    if np.isscalar(value):
        value = (value,)
    out = tuple(float(v) for v in value)
    if not empty_ok and not out:
        raise ConfigError(f"{name} must not be empty")
    return out


@dataclass(frozen=True)
class TrialRecord:
    """Aggregated result for one sweep point."""

    point: float
    bob_ber: float
    eve_ber: float
    afdm_ber: float
    bit_count: int
    seed: int
    wall_ms: float = float("nan")


def _draw_lfsr_state(rng: np.random.Generator, taps: tuple[int, ...]) -> int:
    degree = max(taps)
    nbytes = (degree + 7) // 8
    state = int.from_bytes(rng.bytes(nbytes), "little") & ((1 << degree) - 1)
    return state or 1


def _eve_guess(
    mode: str,
    alice: C2Schedule,
    book: Codebook,
    rng: np.random.Generator,
    bias: float,
) -> C2Schedule:
    n = len(alice)
    if mode == "zeros":
        return zero_schedule(n, "eve")
    if mode == "random":
        idx = rng.integers(0, book.m, size=n)
        return C2Schedule(book.levels[idx], "eve")
    offset = rng.uniform(-bias, bias, size=n)
    if bias > 0.0:
        # pin one entry to the boundary so the guess error sup-norm is exact
        j = int(rng.integers(0, n))
        offset[j] = bias if rng.integers(0, 2) else -bias
    return C2Schedule(alice.values + offset, "eve")


def _perturb(matrix: np.ndarray, rng: np.random.Generator, var: float) -> np.ndarray:
    if var == 0.0:
        return matrix
    scale = np.sqrt(var / 2.0)
    err = scale * (rng.standard_normal(matrix.shape) + 1j * rng.standard_normal(matrix.shape))
    return matrix + err


def _run_trial(
    config: ExperimentConfig,
    point_idx: int,
    trial_idx: int,
    sigma2: float,
    bias: float,
    need_eve: bool,
    need_afdm: bool,
) -> tuple[int, int, int, int]:
    """One frame end to end; returns (bob, eve, afdm, bits) error counts."""
    params = config.frame_params
    book = config.codebook
    const = config.constellation
    n = config.n

    ss = np.random.SeedSequence(config.seed, spawn_key=(point_idx, trial_idx))
    (ss_data, ss_key, ss_chb, ss_nb, ss_che, ss_ne, ss_eve, ss_csi) = ss.spawn(8)

    rng_data = np.random.default_rng(ss_data)
    bits = rng_data.integers(0, 2, size=n * const.bits_per_symbol)
    x = map_bits(bits, const)

    state = _draw_lfsr_state(np.random.default_rng(ss_key), config.lfsr_taps)
    alice = generate_schedule(Lfsr(config.lfsr_taps, state), book, n, "alice")
    bob = C2Schedule(alice.values, "bob")

    rng_csi = np.random.default_rng(ss_csi)

    realization = sample_channel(
        config.paths,
        config.alpha_max,
        np.random.default_rng(ss_chb),
        n=n,
        integer_doppler=config.integer_doppler,
    )
    tx = se_afdm_modulate(x, params, alice)
    r = apply_channel(tx, realization, np.random.default_rng(ss_nb), sigma2)
    y = bob_front_end(r, params, bob)
    h_bob = effective_channel(realization, params, bob, alice).matrix
    h_bob = _perturb(h_bob, rng_csi, config.csi_error_var)
    bob_bits = demap(mmse_equalize(y, h_bob, sigma2), const)
    bob_err = count_errors(bits, bob_bits)

    eve_err = 0
    if need_eve:
        realization_e = sample_channel(
            config.paths,
            config.alpha_max,
            np.random.default_rng(ss_che),
            n=n,
            integer_doppler=config.integer_doppler,
            label="eve",
        )
        guess = _eve_guess(config.eve_mode, alice, book, np.random.default_rng(ss_eve), bias)
        r_e = apply_channel(tx, realization_e, np.random.default_rng(ss_ne), sigma2)
        y_e = eve_front_end(r_e, params, guess)
        # she knows her own front end, not the transmit schedule
        h_eve = effective_channel(realization_e, params, guess, None).matrix
        h_eve = _perturb(h_eve, rng_csi, config.csi_error_var)
        scrambled_hat = mmse_equalize(y_e, h_eve, sigma2)
        eve_bits = demap(descramble(scrambled_hat, guess), const)
        eve_err = count_errors(bits, eve_bits)

    afdm_err = 0
    if need_afdm:
        a0 = zero_schedule(n, "alice")
        b0 = zero_schedule(n, "bob")
        tx0 = se_afdm_modulate(x, params, a0)
        # fresh generator from the same child sequence replays the noise
        r0 = apply_channel(tx0, realization, np.random.default_rng(ss_nb), sigma2)
        y0 = bob_front_end(r0, params, b0)
        h0 = effective_channel(realization, params, b0, a0).matrix
        afdm_bits = demap(mmse_equalize(y0, h0, sigma2), const)
        afdm_err = count_errors(bits, afdm_bits)

    return bob_err, eve_err, afdm_err, bits.size


def _run_point(config: ExperimentConfig, point_idx: int, point: float) -> TrialRecord:
    if config.scenario == "bias-sweep":
        sigma2 = 10.0 ** (-config.snr_db[0] / 10.0)
        bias = point
    else:
        sigma2 = 10.0 ** (-point / 10.0)
        bias = config.eve_bias
    need_eve = config.scenario in ("eve-ber", "csi-error-ber", "bias-sweep")
    need_afdm = config.scenario == "bob-vs-afdm-ber"

    def one(trial_idx: int) -> tuple[int, int, int, int]:
        return _run_trial(config, point_idx, trial_idx, sigma2, bias, need_eve, need_afdm)

    start = time.perf_counter()
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(one, range(config.trials)))
    else:
        outcomes = [one(t) for t in range(config.trials)]
    wall_ms = (time.perf_counter() - start) * 1e3

    bob_err = sum(o[0] for o in outcomes)
    eve_err = sum(o[1] for o in outcomes)
    afdm_err = sum(o[2] for o in outcomes)
    bit_count = sum(o[3] for o in outcomes)
    nan = float("nan")
    return TrialRecord(
        point=point,
        bob_ber=bob_err / bit_count,
        eve_ber=eve_err / bit_count if need_eve else nan,
        afdm_ber=afdm_err / bit_count if need_afdm else nan,
        bit_count=bit_count,
        seed=config.seed,
        wall_ms=wall_ms,
    )


def run_scenario(config: ExperimentConfig) -> list[TrialRecord]:
    """Run a Monte Carlo scenario, one aggregated record per sweep point."""
    if config.scenario not in MONTE_CARLO_SCENARIOS:
        raise ConfigError(
            f"run_scenario handles {MONTE_CARLO_SCENARIOS}; "
            f"use run_sinr_curve or search_space_summary for {config.scenario!r}"
        )
    if config.scenario == "bias-sweep":
        config = replace(config, eve_mode="biased")
        points = config.bias_values
    else:
        points = config.snr_db
    return [_run_point(config, i, p) for i, p in enumerate(points)]


def run_sinr_curve(config: ExperimentConfig) -> SinrCurve:
    """Closed-form eavesdropper SINR over the configured c2max sweep."""
    values = config.c2max_values
    if not values:
        # four decades around the configured operating point
        values = tuple(config.c2max * 10.0 ** e for e in np.linspace(-2, 2, 17))
    gamma = 10.0 ** (config.snr_db[0] / 10.0)
    return eve_sinr_curve(config.n, gamma, values)


def search_space_summary(config: ExperimentConfig) -> dict:
    """Exhaustive-search size of the schedule space for this geometry."""
    bits = search_space_bits(config.codebook, config.n)
    return {
        "n": config.n,
        "codebook_size": config.m,
        "bits_per_subcarrier": config.codebook.bits_per_subcarrier,
        "search_space_bits": bits,
        "log10_schedules": bits * float(np.log10(2.0)),
    }


def wilson(errors: int, total: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for an error probability."""
    if total <= 0 or errors < 0 or errors > total:
        raise ConfigError("need 0 <= errors <= total with total > 0")
    phat = errors / total
    denom = 1.0 + z * z / total
    center = (phat + z * z / (2 * total)) / denom
    half = z * np.sqrt(phat * (1 - phat) / total + z * z / (4 * total * total)) / denom
    return max(center - half, 0.0), min(center + half, 1.0)


_CSV_COLUMNS = ("point", "bob_ber", "eve_ber", "afdm_ber", "bit_count", "seed")


def emit_csv(records: list[TrialRecord], path: str | Path, config: ExperimentConfig | None = None) -> None:
    """Write sweep records to CSV plus a JSON sidecar with run provenance.

    The CSV holds only reproducible numbers; wall-clock times and config
    echo live in ``<path>.meta.json`` so diffing two runs of the same seed
    yields byte-identical CSVs.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_COLUMNS)
        for rec in records:
            writer.writerow(
                [
                    repr(rec.point),
                    repr(rec.bob_ber),
                    repr(rec.eve_ber),
                    repr(rec.afdm_ber),
                    rec.bit_count,
                    rec.seed,
                ]
            )
    meta = {
        "version": _VERSION,
        "rng": "numpy.random.default_rng (PCG64)",
        "seed_policy": _SEED_POLICY,
        "config": None if config is None else _jsonable(asdict(config)),
        "wall_ms": [rec.wall_ms for rec in records],
        "wilson_95": {
            "bob": [_interval(rec.bob_ber, rec.bit_count) for rec in records],
            "eve": [_interval(rec.eve_ber, rec.bit_count) for rec in records],
        },
    }
    Path(f"{path}.meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def _interval(ber: float, bits: int) -> tuple[float, float] | None:
    if not np.isfinite(ber):
        return None
    return wilson(int(round(ber * bits)), bits)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def read_csv(path: str | Path) -> list[TrialRecord]:
    """Load records written by :func:`emit_csv` (wall times stay in the sidecar)."""
    out = []
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != _CSV_COLUMNS:
            raise ConfigError(f"unexpected CSV header in {path}: {reader.fieldnames}")
        for row in reader:
            out.append(
                TrialRecord(
                    point=float(row["point"]),
                    bob_ber=float(row["bob_ber"]),
                    eve_ber=float(row["eve_ber"]),
                    afdm_ber=float(row["afdm_ber"]),
                    bit_count=int(row["bit_count"]),
                    seed=int(row["seed"]),
                )
            )
    return out
