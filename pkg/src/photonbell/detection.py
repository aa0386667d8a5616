"""Heralded single-photon trials through a noisy channel into gated detectors.

Produces Bell-analyzer count tables (one row per prepared state, one column
per detector port plus a no-click column) and interference phase sweeps.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import rng
from .circuits import BELL_ANALYZER, BELL_PREP, Analyzer, PrepSettings, prepare
from .elements import rotation_jones
from .states import PhotonState, nearest_named_state

CSV_HEADER = ("prepared", "portΨ+", "portΨ−", "portΦ+", "portΦ−", "none")


@dataclass(frozen=True)
class ChannelNoise:
    """Per-trial phase jitter and static errors between sender and receiver.

    ``phase_sigma``/``phase_offset`` act on path a (radians); the misalignment
    angles rotate the polarization of each path (degrees).
    """

    phase_sigma: float = 0.0
    phase_offset: float = 0.0
    pol_misalign_a: float = 0.0
    pol_misalign_b: float = 0.0

    def __post_init__(self):
        if not self.phase_sigma >= 0:
            raise ValueError("phase_sigma must be >= 0")


@dataclass(frozen=True)
class DetectorModel:
    eta: tuple = (1.0, 1.0, 1.0, 1.0)
    dark_rate: float = 0.0
    gate_window: float = 3e-9
    herald_efficiency: float = 1.0

    def __post_init__(self):
        eta = tuple(float(e) for e in np.broadcast_to(np.asarray(self.eta, float), (4,)))
        object.__setattr__(self, "eta", eta)
        if any(not 0.0 <= e <= 1.0 for e in eta):
            raise ValueError(f"efficiencies must lie in [0, 1]: {eta}")
        if not 0.0 <= self.herald_efficiency <= 1.0:
            raise ValueError("herald_efficiency must lie in [0, 1]")
        if self.dark_rate < 0 or self.gate_window < 0:
            raise ValueError("dark_rate and gate_window must be >= 0")

    @property
    def dark_click_prob(self) -> float:
        """Probability of at least one dark count in one gate."""
        return -math.expm1(-self.dark_rate * self.gate_window)


def _channel_batch(amps: np.ndarray, noise: ChannelNoise, normals: np.ndarray) -> np.ndarray:
    out = np.array(amps, dtype=complex, copy=True)
    phase = noise.phase_offset + noise.phase_sigma * normals
    out[:, :2] *= np.exp(1j * phase)[:, None]
    if noise.pol_misalign_a:
        out[:, :2] = out[:, :2] @ rotation_jones(noise.pol_misalign_a).T
    if noise.pol_misalign_b:
        out[:, 2:] = out[:, 2:] @ rotation_jones(noise.pol_misalign_b).T
    return out


def apply_channel_batch(amps: np.ndarray, noise: ChannelNoise, draw: np.random.Generator) -> np.ndarray:
    """Channel applied row-wise to an (n, 4) stack; consumes exactly n normal draws."""
    amps = np.atleast_2d(amps)
    return _channel_batch(amps, noise, draw.standard_normal(len(amps)))


def apply_channel(s: PhotonState, noise: ChannelNoise, draw: np.random.Generator) -> PhotonState:
    return PhotonState(apply_channel_batch(s.amp[None, :], noise, draw)[0])


def mean_channel(s: PhotonState, noise: ChannelNoise) -> PhotonState:
    """The channel with the jitter switched off (static offset and misalignment only)."""
    return PhotonState(_channel_batch(s.amp[None, :], noise, np.zeros(1))[0])


def expected_probs(
    s: PhotonState, noise: ChannelNoise, analyzer: Analyzer = BELL_ANALYZER, order: int = 64
) -> np.ndarray:
    """Port probabilities averaged over the Gaussian phase jitter (Gauss-Hermite quadrature)."""
    if noise.phase_sigma == 0:
        return analyzer.probs(mean_channel(s, noise)).probs.copy()
    nodes, weights = np.polynomial.hermite_e.hermegauss(order)
    amps = _channel_batch(np.tile(s.amp, (order, 1)), noise, nodes)
    return weights @ analyzer.batch_probs(amps) / weights.sum()


def expected_click_probs(probs: np.ndarray, d: DetectorModel) -> np.ndarray:
    """Per-port probability of a click in one herald attempt (signal or dark)."""
    signal = np.asarray(probs, float) * np.asarray(d.eta)
    return d.herald_efficiency * (1.0 - (1.0 - signal) * (1.0 - d.dark_click_prob))


def sample_clicks(probs: np.ndarray, d: DetectorModel, draw: np.random.Generator) -> np.ndarray:
    """Boolean (n, 4) click pattern for n gates given per-gate port probabilities.

    Draw order per call is fixed: herald, port, efficiency, dark counts.
    """
    probs = np.atleast_2d(probs)
    n = len(probs)
    u_herald = draw.random(n)
    u_port = draw.random(n)
    u_eta = draw.random(n)
    u_dark = draw.random((n, 4))

    heralded = u_herald < d.herald_efficiency
    cum = np.cumsum(probs, axis=1)
    port = np.minimum((u_port[:, None] >= cum[:, :3]).sum(axis=1), 3)
    registered = u_eta < np.asarray(d.eta)[port]

    clicks = np.zeros((n, 4), dtype=bool)
    clicks[np.arange(n), port] = heralded & registered
    clicks |= heralded[:, None] & (u_dark < d.dark_click_prob)
    return clicks


def sample_trial(dist, d: DetectorModel, draw: np.random.Generator) -> frozenset:
    """Ports (0..3) that click within one coincidence gate."""
    probs = getattr(dist, "probs", dist)
    clicks = sample_clicks(np.asarray(probs, float)[None, :], d, draw)[0]
    return frozenset(int(i) for i in np.flatnonzero(clicks))


def simulate_counts(
    state: PhotonState,
    n: int,
    noise: ChannelNoise = ChannelNoise(),
    d: DetectorModel = DetectorModel(),
    seed: int = 0,
    stream: int = 0,
    analyzer: Analyzer = BELL_ANALYZER,
    workers: int = 1,
) -> np.ndarray:
    """Click counts per port plus the no-click count for ``n`` attempts with one input state."""
    def run_block(block: int, start: int, size: int) -> np.ndarray:
        draw = rng.block_generator(seed, stream, block)
        amps = apply_channel_batch(np.tile(state.amp, (size, 1)), noise, draw)
        clicks = sample_clicks(analyzer.batch_probs(amps), d, draw)
        return np.append(clicks.sum(axis=0), (~clicks.any(axis=1)).sum())

    parts = rng.map_blocks(run_block, n, workers)
    return np.sum(parts, axis=0, dtype=np.int64)


def _describe(settings: PrepSettings, i: int) -> str:
    label = nearest_named_state(prepare(settings))
    return label.name if label is not None else f"prep{i}"


@dataclass
class CountTable:
    rows: list
    counts: np.ndarray
    metadata: dict = field(default_factory=dict)

    columns = CSV_HEADER[1:]

    def row(self, name: str) -> np.ndarray:
        return self.counts[self.rows.index(name)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for name, c in zip(self.rows, self.counts):
            w.writerow([name, *(int(x) for x in c)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "columns": list(CSV_HEADER),
            "rows": [[name, *(int(x) for x in c)] for name, c in zip(self.rows, self.counts)],
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CountTable":
        data = json.loads(text)
        rows = [r[0] for r in data["rows"]]
        counts = np.array([r[1:] for r in data["rows"]], dtype=np.int64)
        return cls(rows, counts, data.get("metadata", {}))


def run_confusion(
    prep_list: Sequence[PrepSettings] = BELL_PREP,
    n: int = 10_000,
    noise: ChannelNoise = ChannelNoise(),
    detector: DetectorModel = DetectorModel(),
    seed: int = 0,
    workers: int = 1,
) -> CountTable:
    """Count table for ``n`` herald attempts per prepared state through the Bell analyzer.

    A failed herald opens no gate and lands in the no-click column.  Multi-click
    gates count once in every clicking column.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rows, counts = [], []
    for i, settings in enumerate(prep_list):
        rows.append(_describe(settings, i))
        counts.append(simulate_counts(prepare(settings), n, noise, detector, seed, i, BELL_ANALYZER, workers))
    meta = {
        "seed": seed,
        "trials": n,
        "noise": asdict(noise),
        "detector": {**asdict(detector), "eta": list(detector.eta)},
        "prep": [asdict(s) for s in prep_list],
    }
    return CountTable(rows, np.array(counts, dtype=np.int64), meta)


@dataclass
class SweepTable:
    """Generic numeric table: one row per grid point."""

    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(x) for x in r])
        return buf.getvalue()

    def to_json(self) -> str:
        data = {"columns": self.columns, "rows": self.rows, "metadata": self.metadata}
        return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


PORT_KEYS = ("psi_plus", "psi_minus", "phi_plus", "phi_minus")


def phase_sweep(
    prep: PrepSettings,
    offsets: Sequence[float],
    n: int,
    detector: DetectorModel = DetectorModel(),
    seed: int = 0,
    noise: ChannelNoise = ChannelNoise(),
    workers: int = 1,
) -> SweepTable:
    """Analytic and empirical Bell-port frequencies with the channel phase offset set to each grid value.

    The analytic columns are jitter-averaged port probabilities before
    detection; empirical columns are click counts over ``n`` attempts.
    """
    offsets = list(offsets)
    if not offsets:
        raise ValueError("empty phase grid")
    if n < 1:
        raise ValueError("n must be >= 1")
    state = prepare(prep)
    columns = ["phi"] + [f"analytic_{k}" for k in PORT_KEYS] + [f"empirical_{k}" for k in PORT_KEYS] + ["none"]
    rows = []
    for j, phi in enumerate(offsets):
        ch = ChannelNoise(noise.phase_sigma, float(phi), noise.pol_misalign_a, noise.pol_misalign_b)
        analytic = expected_probs(state, ch)
        counts = simulate_counts(state, n, ch, detector, seed, j, BELL_ANALYZER, workers)
        rows.append([float(phi), *map(float, analytic), *(float(c) / n for c in counts)])
    meta = {"seed": seed, "trials": n, "prep": asdict(prep), "noise": asdict(noise)}
    return SweepTable(columns, rows, meta)
