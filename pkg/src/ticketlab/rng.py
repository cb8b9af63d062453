"""Deterministic random streams built on the splitmix64 mixer.

Every stochastic choice in the package (weight init, epoch shuffling,
random pruning scores, synthetic data) draws from these functions, so a
seed pins the whole experiment bit-for-bit on any platform and any numpy
version.

Scheme: output i of the stream with seed s is mix64(s + i * GAMMA), where
mix64 is the splitmix64 finalizer and GAMMA its golden-ratio increment.
Because output i depends only on (s, i) the streams vectorize, and
substreams are derived by folding integer path components into the seed
(see `derive`).
"""

from __future__ import annotations

import numpy as np

_M64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB

_GAMMA_U64 = np.uint64(_GAMMA)
_MIX_A_U64 = np.uint64(_MIX_A)
_MIX_B_U64 = np.uint64(_MIX_B)
_U2_POW_NEG53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    """Splitmix64 finalizer on a 64-bit integer."""
    z &= _M64
    z = ((z ^ (z >> 30)) * _MIX_A) & _M64
    z = ((z ^ (z >> 27)) * _MIX_B) & _M64
    return (z ^ (z >> 31)) & _M64


def derive(seed: int, *path: int) -> int:
    """Derive a child seed from `seed` and an integer path.

    Used to give each consumer (per-layer init, per-epoch shuffle, ...)
    its own independent stream: child = mix64((state + GAMMA) ^ mix64(c))
    folded left to right over the path components.
    """
    state = seed & _M64
    for c in path:
        state = mix64(((state + _GAMMA) & _M64) ^ mix64(c))
    return state


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX_A_U64
    z = (z ^ (z >> np.uint64(27))) * _MIX_B_U64
    return z ^ (z >> np.uint64(31))


def raw64(seed: int, n: int) -> np.ndarray:
    """First `n` outputs of the stream, as uint64."""
    idx = np.arange(1, n + 1, dtype=np.uint64)
    return _mix_array(np.uint64(seed & _M64) + idx * _GAMMA_U64)


def uniforms(seed: int, n: int) -> np.ndarray:
    """`n` i.i.d. uniforms in [0, 1) with 53-bit resolution."""
    return (raw64(seed, n) >> np.uint64(11)).astype(np.float64) * _U2_POW_NEG53


def normals(seed: int, n: int) -> np.ndarray:
    """`n` i.i.d. standard normals via Box-Muller on two substreams."""
    m = (n + 1) // 2
    u1 = uniforms(derive(seed, 0), m)
    u2 = uniforms(derive(seed, 1), m)
    # 1 - u1 is in (0, 1], so the log is finite.
    r = np.sqrt(-2.0 * np.log1p(-u1))
    theta = (2.0 * np.pi) * u2
    return np.concatenate([r * np.cos(theta), r * np.sin(theta)])[:n]


def permutation(seed: int, n: int) -> np.ndarray:
    """Deterministic permutation of range(n): argsort of stream keys.

    Stable sort makes the (astronomically unlikely) key collision
    deterministic too.
    """
    return np.argsort(raw64(seed, n), kind="stable")
