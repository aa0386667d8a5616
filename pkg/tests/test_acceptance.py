"""Exit criteria for the build.  Each test prints one PASS/FAIL line.

Run directly with ``python tests/test_acceptance.py`` or as part of pytest.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from photonbell import rng
from photonbell.circuits import BELL_ANALYZER, BPRIME_RECEIVER, settings_for, prepare
from photonbell.detection import (
    ChannelNoise,
    DetectorModel,
    apply_channel,
    expected_click_probs,
    expected_probs,
    phase_sweep,
    simulate_counts,
)
from photonbell.elements import apply, compose, hwp, pbs, phase_shifter, rotator
from photonbell.qkd import QkdParams, run_qkd
from photonbell.states import (
    AlphabetLabel,
    BellLabel,
    BPrimeLabel,
    PhotonState,
    ProductLabel,
    SpatialMode,
    bell_state,
    fidelity,
    named_state,
)

import oracles

EXACT = 1e-12


@pytest.fixture
def verdict(request, capsys):
    """Print one line per criterion with the test's outcome."""
    name = request.node.name
    state = {"ok": False}
    yield state
    with capsys.disabled():
        print(f"\n[acceptance] {'PASS' if state['ok'] else 'FAIL'} {name}")


def binomial_ok(count, n, p):
    return abs(count - n * p) <= 4 * math.sqrt(n * p * (1 - p)) + 1e-9


def test_criterion_1_bell_analyzer_determinism(verdict):
    t0 = time.perf_counter()
    for label in BellLabel:
        s = prepare(settings_for(label))
        p = BELL_ANALYZER.probs(s).probs
        expected = np.eye(4)[list(BellLabel).index(label)]
        np.testing.assert_allclose(p, expected, rtol=0, atol=EXACT)
    assert time.perf_counter() - t0 < 1.0
    verdict["ok"] = True


def test_criterion_2_preparation_table(verdict):
    targets = list(BellLabel) + list(AlphabetLabel) + list(ProductLabel)
    assert len(targets) == 12
    for label in targets:
        f = fidelity(prepare(settings_for(label)), named_state(label))
        assert abs(f - 1) <= EXACT, (label, f)
    sv = settings_for(AlphabetLabel.SV)
    assert (sv.prep_hwp, sv.flip_a, sv.flip_b) == (22.5, True, False)
    verdict["ok"] = True


def test_criterion_3_bprime_bijection(verdict):
    ports = []
    for label in BPrimeLabel:
        p = BPRIME_RECEIVER.probs(named_state(label)).probs
        port = int(np.argmax(p))
        assert abs(p[port] - 1) <= EXACT
        np.testing.assert_allclose(np.delete(p, port), 0, atol=EXACT)
        ports.append(port)
    assert sorted(ports) == [0, 1, 2, 3]
    bell_port = dict(zip(BPRIME_RECEIVER.labels, BELL_ANALYZER.labels))
    assert bell_port[BPrimeLabel.SPlus45] is BellLabel.PsiPlus
    assert bell_port[BPrimeLabel.APlus45] is BellLabel.PsiMinus
    verdict["ok"] = True


def test_criterion_4_pi_phase_error(verdict):
    noise = ChannelNoise(phase_offset=math.pi)
    out = apply_channel(bell_state(BellLabel.PsiMinus), noise, rng.generator(0))
    p = BELL_ANALYZER.probs(out)
    assert abs(p[BellLabel.PsiPlus] - 1) <= EXACT
    p2 = expected_probs(bell_state(BellLabel.PsiMinus), noise)
    assert abs(p2[0] - 1) <= EXACT
    verdict["ok"] = True


def test_criterion_5_interference_law(verdict):
    t0 = time.perf_counter()
    n = 100_000
    grid = np.linspace(0, 2 * math.pi, 11)
    table = phase_sweep(settings_for(BellLabel.PsiPlus), grid, n, seed=2003)
    analytic = table.column("analytic_psi_plus")
    np.testing.assert_allclose(analytic, np.cos(grid / 2) ** 2, rtol=0, atol=EXACT)
    np.testing.assert_allclose(table.column("analytic_psi_minus"), np.sin(grid / 2) ** 2, rtol=0, atol=EXACT)
    for p, freq in zip(np.cos(grid / 2) ** 2, table.column("empirical_psi_plus")):
        assert binomial_ok(round(freq * n), n, p)
    assert time.perf_counter() - t0 < 30.0
    verdict["ok"] = True


def _random_element(rs):
    mode = SpatialMode.A if rs.random() < 0.5 else SpatialMode.B
    parts = [
        hwp(mode, rs.uniform(-360, 360)),
        phase_shifter(mode, rs.uniform(-10, 10)),
        rotator(SpatialMode.B if mode is SpatialMode.A else SpatialMode.A, rs.uniform(-180, 180)),
        pbs(),
    ]
    order = rs.permutation(len(parts))
    return compose([parts[i] for i in order[: rs.integers(1, 5)]])


def test_criterion_6_unitarity_and_norm(verdict):
    rs = np.random.default_rng(6)
    for _ in range(1000):
        e = _random_element(rs)
        np.testing.assert_allclose(e.matrix.conj().T @ e.matrix, np.eye(4), rtol=0, atol=EXACT)
        z = rs.normal(size=4) + 1j * rs.normal(size=4)
        s = PhotonState(z / np.linalg.norm(z))
        assert abs(s.norm - 1) <= EXACT
        assert abs(apply(e, s).norm - 1) <= EXACT
    verdict["ok"] = True


def test_criterion_7_monte_carlo_matches_analytic(verdict):
    rs = np.random.default_rng(7)
    n = 100_000
    for k in range(20):
        z = rs.normal(size=4) + 1j * rs.normal(size=4)
        s = PhotonState(z / np.linalg.norm(z))
        noise = ChannelNoise(
            phase_sigma=rs.uniform(0, 2),
            phase_offset=rs.uniform(-math.pi, math.pi),
            pol_misalign_a=rs.uniform(-10, 10),
            pol_misalign_b=rs.uniform(-10, 10),
        )
        d = DetectorModel(eta=tuple(rs.uniform(0.5, 1, 4)), dark_rate=rs.uniform(0, 1e6))
        analytic = expected_click_probs(expected_probs(s, noise), d)
        counts = simulate_counts(s, n, noise, d, seed=700, stream=k)
        for port in range(4):
            assert binomial_ok(counts[port], n, analytic[port]), (k, port, counts, analytic)
    verdict["ok"] = True


def test_criterion_8_qkd(verdict):
    t0 = time.perf_counter()
    ideal = run_qkd(QkdParams(n_photons=100_000, seed=80))
    assert ideal.qber == 0.0 and ideal.bit_errors == 0
    assert ideal.key_bits == 2 * ideal.sifted
    assert ideal.to_dict()["bits_per_sifted_photon"] == 2

    eve = run_qkd(QkdParams(n_photons=100_000, eve_active=True, seed=81))
    expected = oracles.intercept_resend_qber()
    assert expected == pytest.approx(0.25, abs=1e-15)
    assert abs(eve.qber - expected) <= 4 * math.sqrt(expected * (1 - expected) / eve.key_bits)

    for sigma in (0.2, 0.5, 1.0, 2.0):
        noisy = run_qkd(QkdParams(n_photons=100_000, noise=ChannelNoise(phase_sigma=sigma), seed=82))
        assert noisy.per_basis["B"]["qber"] == 0.0
    assert time.perf_counter() - t0 < 60.0
    verdict["ok"] = True


def _cli(*argv):
    return subprocess.run(
        [sys.executable, "-m", "photonbell", *argv], check=True, capture_output=True
    ).stdout


def test_criterion_9_reproducibility(verdict):
    runs = [
        ("confusion", "--trials", "20000", "--phase-sigma", "0.4", "--dark-rate", "1e6", "--eta", "0.6,0.6,0.9,0.9"),
        ("confusion", "--trials", "20000", "--format", "json", "--herald-efficiency", "0.7"),
        ("qkd", "--photons", "20000", "--eve", "--phase-sigma", "0.3"),
        ("sweep", "--phi-grid", "0,pi/3,pi", "--trials", "20000"),
        ("sweep", "--sigma-grid", "0,0.5,1", "--trials", "20000", "--format", "json"),
        ("state", "--hwp", "22.5", "--phi", "pi", "--flip-a", "--flip-b"),
    ]
    for argv in runs:
        outputs = {_cli(*argv, *(("--seed", "11", "--workers", w) if argv[0] != "state" else ())) for w in ("1", "1", "3", "8")}
        assert len(outputs) == 1, argv
    verdict["ok"] = True


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
