"""Independent reference computations used to derive expected values in the tests.

Nothing here imports the package: matrices and states are written out by hand.
"""

import itertools
import math

import numpy as np
from scipy.integrate import quad

r = 1 / math.sqrt(2)

# ordering aH, aV, bH, bV
AH, AV, BH, BV = np.eye(4)

PSI_P = r * (AH + BV)
PSI_M = r * (AH - BV)
PHI_P = r * (AV + BH)
PHI_M = r * (AV - BH)

S_P45 = 0.5 * np.array([1, 1, 1, 1.0])
A_P45 = 0.5 * np.array([1, 1, -1, -1.0])
S_M45 = 0.5 * np.array([1, -1, 1, -1.0])
A_M45 = 0.5 * np.array([1, -1, -1, 1.0])

B_SYMBOLS = [AV, AH, BV, BH]
BPRIME_SYMBOLS = [S_P45, A_P45, S_M45, A_M45]


def hwp_a(deg):
    t = math.radians(2 * deg)
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, s, 0, 0], [s, -c, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], dtype=complex)


def hwp_b(deg):
    t = math.radians(2 * deg)
    c, s = math.cos(t), math.sin(t)
    return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, c, s], [0, 0, s, -c]], dtype=complex)


def phase_a(phi):
    return np.diag([np.exp(1j * phi), np.exp(1j * phi), 1, 1])


# columns: where aH, aV, bH, bV go
PBS = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex)


def prep_matrix(prep_hwp, phi, flip_a, flip_b):
    m = phase_a(phi) @ PBS @ hwp_a(prep_hwp)
    if flip_a:
        m = hwp_a(45) @ m
    if flip_b:
        m = hwp_b(45) @ m
    return m


def fid(x, y):
    return abs(np.vdot(x, y)) ** 2


def gaussian_mean(f, sigma):
    """E[f(d)] for d ~ N(0, sigma^2) by adaptive quadrature."""
    if sigma == 0:
        return f(0.0)
    g = lambda d: f(d) * math.exp(-d * d / (2 * sigma * sigma)) / (math.sqrt(2 * math.pi) * sigma)
    return quad(g, -12 * sigma, 12 * sigma, limit=500)[0]


def intercept_resend_qber():
    """Exact per-bit QBER on sifted rounds with Eve always active, by enumeration."""
    bases = [B_SYMBOLS, BPRIME_SYMBOLS]
    err = 0.0
    for sb, i, eb in itertools.product(range(2), range(4), range(2)):
        sent = bases[sb][i]
        for j, e in enumerate(bases[eb]):
            p_eve = fid(e, sent)
            for k, bob in enumerate(bases[sb]):
                p_bob = fid(bob, e)
                bit_errors = bin(i ^ k).count("1")
                err += 0.5 * 0.25 * 0.5 * p_eve * p_bob * bit_errors / 2
    return err
