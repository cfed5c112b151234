"""Reservoir trajectory engine: exact density-matrix evolution per timestep with
feature extraction either exact (Z expectations) or via simulated finite-shot
measurement. The trajectory itself is always exact; measurement never back-acts,
since each timestep corresponds to a fresh circuit run on hardware.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .circuit import SubsystemLayout, build_layer
from .errors import ConfigError, CorruptedStateError
from .noise import DeviceNoiseProfile, apply_device_noise, zero_noise
from .qstate import DensityMatrix, pauli_z_expectations, plus_state

EXACT = "exact"

# diagonal clipping: tiny negatives are floating-point drift, larger are bugs
_CLIP_TOL = 1e-9
_MASS_TOL = 1e-6


@dataclass(frozen=True)
class ReservoirConfig:
    layout: SubsystemLayout
    scale: float
    profile: DeviceNoiseProfile = zero_noise()
    shots: Union[int, str] = EXACT
    seed: int = 0

    def __post_init__(self):
        if not np.isfinite(self.scale):
            raise ConfigError(f"scale must be finite, got {self.scale}")
        s = self.shots
        if s != EXACT and (not isinstance(s, int) or s < 1):
            raise ConfigError(f"shots must be 'exact' or a positive int, got {s!r}")

    @property
    def exact(self) -> bool:
        return self.shots == EXACT


@dataclass(frozen=True, eq=False)
class FeatureSeries:
    """Per-timestep feature rows h(rho_t); the readout appends the bias 1."""

    values: np.ndarray  # (timesteps, width)

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if v.ndim != 2:
            raise ValueError(f"feature values must be 2-d, got shape {v.shape}")
        if not np.isfinite(v).all():
            raise ValueError("feature values contain NaN/Inf")
        object.__setattr__(self, "values", v)

    @property
    def timesteps(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def to_csv(self, path) -> None:
        header = "t," + ",".join(f"z{i}" for i in range(self.width))
        rows = np.column_stack([np.arange(1, self.timesteps + 1), self.values])
        fmt = ["%d"] + ["%.17g"] * self.width
        np.savetxt(path, rows, delimiter=",", header=header, comments="", fmt=fmt)

    @classmethod
    def from_csv(cls, path) -> "FeatureSeries":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(data[:, 1:])


def sample_bitstrings(state: DensityMatrix, shots: int, readout_flip,
                      rng: np.random.Generator) -> np.ndarray:
    """Draw `shots` n-bit strings from diag(rho), then apply readout flips.

    Returns a (shots, n) array of 0/1. Bit i corresponds to qubit i.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    n = state.num_qubits
    probs = np.real(np.diagonal(state.matrix)).copy()
    lo = probs.min()
    if lo < -_CLIP_TOL:
        raise CorruptedStateError(
            f"diagonal entry {lo:.3e} is negative beyond tolerance")
    mass = probs.sum()
    if abs(mass - 1.0) > _MASS_TOL:
        raise CorruptedStateError(
            f"diagonal mass {mass!r} deviates from 1 beyond tolerance")
    np.clip(probs, 0.0, None, out=probs)
    probs /= probs.sum()
    indices = rng.choice(state.dim, size=shots, p=probs)
    shifts = np.arange(n - 1, -1, -1)
    bits = ((indices[:, None] >> shifts) & 1).astype(np.uint8)
    r01, r10 = readout_flip
    if r01 > 0.0 or r10 > 0.0:
        flip_prob = np.where(bits == 0, r01, r10)
        bits ^= rng.random(bits.shape) < flip_prob
    return bits


def _features_from_bits(bits: np.ndarray) -> np.ndarray:
    # outcome +1 for bit 0, -1 for bit 1
    return 1.0 - 2.0 * bits.mean(axis=0)


def run_reservoir(inputs, config: ReservoirConfig) -> FeatureSeries:
    """Evolve rho_0 = |+><+|^n through one noisy layer per input and record
    features. Sampled mode draws per-timestep shot noise from substream
    (seed, t) so results are reproducible and order-independent.
    """
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim != 1 or inputs.size < 1:
        raise ConfigError(f"need a 1-d, non-empty input sequence, got shape {inputs.shape}")
    if not np.isfinite(inputs).all():
        raise ConfigError("inputs contain NaN/Inf")
    layout = config.layout
    n = layout.num_qubits
    state = plus_state(n)
    rows = np.empty((inputs.size, n))
    flips = config.profile.readout_flip
    for t, u in enumerate(inputs, start=1):
        layer = build_layer(float(u), layout, config.scale)
        state = apply_device_noise(state, config.profile, layer)
        if config.exact:
            rows[t - 1] = pauli_z_expectations(state)
        else:
            rng = np.random.default_rng([config.seed, t])
            bits = sample_bitstrings(state, config.shots, flips, rng)
            rows[t - 1] = _features_from_bits(bits)
    return FeatureSeries(rows)


def split_series(features: FeatureSeries, washout: int, train: int, test: int):
    """Washout/train/test windows: rows t in [washout+1, washout+train] and
    (washout+train, washout+train+test], 1-based."""
    for name, v in (("washout", washout), ("train", train), ("test", test)):
        if v < 0:
            raise ConfigError(f"{name} must be >= 0, got {v}")
    total = washout + train + test
    if total > features.timesteps:
        raise ConfigError(
            f"windows need {total} timesteps, series has {features.timesteps}")
    a, b = washout, washout + train
    return (FeatureSeries(features.values[a:b]),
            FeatureSeries(features.values[b:b + test]))
