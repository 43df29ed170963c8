"""Shared helpers for the test-suite: random symplectic maps and states."""

import numpy as np

from qbmgauss.symplectic import GaussianState

# lines collected by the acceptance module and echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def squeezer(r):
    return np.diag([np.exp(-r), np.exp(r)])


def embed(block, mode, n):
    out = np.eye(2 * n)
    out[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2] = block
    return out


def beam_splitter(theta, i, j, n):
    out = np.eye(2 * n)
    c, s = np.cos(theta), np.sin(theta)
    for q in range(2):
        a, b = 2 * i + q, 2 * j + q
        out[a, a], out[a, b], out[b, a], out[b, b] = c, s, -s, c
    return out


def random_symplectic(n, rng, max_r=1.0):
    s = np.eye(2 * n)
    for _ in range(2):
        for k in range(n):
            s = embed(rotation(rng.uniform(0, 2 * np.pi)), k, n) @ s
            s = embed(squeezer(rng.uniform(-max_r, max_r)), k, n) @ s
        for i in range(n):
            for j in range(i + 1, n):
                s = beam_splitter(rng.uniform(0, 2 * np.pi), i, j, n) @ s
    return s


def random_state(n, rng, max_r=1.0, max_nu=4.0, pure=False) -> GaussianState:
    """S diag(nu) S^T with random symplectic S and nu >= 1."""
    nu = np.ones(n) if pure else rng.uniform(1.0, max_nu, n)
    s = random_symplectic(n, rng, max_r)
    return GaussianState(s @ np.diag(np.repeat(nu, 2)) @ s.T)


def sign_changes(values) -> int:
    d = np.diff(np.asarray(values))
    d = d[d != 0]
    return int(np.sum(np.sign(d[1:]) != np.sign(d[:-1])))
