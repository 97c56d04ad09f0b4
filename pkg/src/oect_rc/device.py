"""Transient model of a single organic electrochemical transistor.

The channel voltage ``V1`` follows a first-order RC relaxation towards the
gate voltage, and the drain voltage is an algebraic, piecewise function of
``(V_G, V1)`` with three operating regimes (saturation, cutoff, linear).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numba
import numpy as np


class Regime(enum.IntEnum):
    SATURATION = 0
    CUTOFF = 1
    LINEAR = 2


@dataclass(frozen=True)
class OectParams:
    """Physical constants of one device (SI units).

    ``v_bias`` and ``v_p`` may be negative; every other field must be
    strictly positive.
    """

    v_bias: float = -0.5
    v_p: float = -0.6
    r: float = 500.0
    r_g: float = 2.7e4
    c_g: float = 8.98e-7
    k_p: float = 5.82e-4
    w: float = 1.01e-4
    l: float = 2.0e-4

    def __post_init__(self):
        for name in ("r", "r_g", "c_g", "k_p", "w", "l"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value!r}")

    @property
    def tau(self) -> float:
        """Gate RC time constant in seconds."""
        return self.r_g * self.c_g


@dataclass(frozen=True)
class CoeffPair:
    a: float
    b: float


def derived_coefficients(p: OectParams) -> CoeffPair:
    """Return ``a = R / 2R_G`` and ``b = K_p W R / L``."""
    return CoeffPair(a=p.r / (2.0 * p.r_g), b=p.k_p * p.w * p.r / p.l)


def v1_rate(p: OectParams, v_g: float, v1: float) -> float:
    return (v_g - v1) / (p.r_g * p.c_g)


def channel_current(p: OectParams, v1: float, v_d: float) -> float:
    """Channel current for given channel and drain voltages.

    Branch guards are evaluated in order (saturation, cutoff, linear).
    """
    gain = p.k_p * p.w / p.l
    if v1 - v_d > p.v_p:
        return -0.5 * gain * (v1 - p.v_p) ** 2
    if v1 > p.v_p and v_d <= 0.0:
        return 0.0
    return -gain * (v1 - p.v_p - 0.5 * v_d) * v_d


@numba.njit(cache=True)
def _linear_branch(v_bias, v_p, a, b, v_g, v1):
    disc = 2.0 * b * (v_bias + a * (v_g - v1)) + (b * (v1 - v_p) - 1.0) ** 2
    if disc < 0.0:
        disc = 0.0
    return -1.0 / b + (v1 - v_p) + math.sqrt(disc) / b


@numba.njit(cache=True)
def _drain_kernel(v_bias, v_p, a, b, v_g, v1):
    # Candidate-and-check: the saturation guard depends on V_D itself.
    base = v_bias + a * (v_g - v1)
    sat = base + 0.5 * b * (v1 - v_p) ** 2
    if v1 - sat > v_p:
        return sat, 0
    if v1 > v_p and base <= 0.0:
        return base, 1
    return _linear_branch(v_bias, v_p, a, b, v_g, v1), 2


@numba.njit(cache=True)
def _drain_array(v_bias, v_p, a, b, v_g, v1, out):
    for n in range(v1.shape[0]):
        out[n] = _drain_kernel(v_bias[n], v_p[n], a[n], b[n], v_g[n], v1[n])[0]
    return out


def drain_voltage(
    p: OectParams, c: CoeffPair, v_g: float, v1: float
) -> tuple[float, Regime]:
    """Solve the device circuit for the drain voltage.

    Returns the drain voltage and the regime whose branch produced it.
    Saturation takes precedence over cutoff when both are self-consistent.
    """
    v_d, code = _drain_kernel(
        float(p.v_bias), float(p.v_p), float(c.a), float(c.b), float(v_g), float(v1)
    )
    return v_d, Regime(code)


def linear_branch_voltage(p: OectParams, c: CoeffPair, v_g: float, v1: float) -> float:
    """Linear-regime closed form with the discriminant clamped at zero.

    When the guards are resolved in order this branch is only reached with a
    positive discriminant; the clamp matters for direct evaluation.
    """
    return _linear_branch(
        float(p.v_bias), float(p.v_p), float(c.a), float(c.b), float(v_g), float(v1)
    )


def drain_voltages(v_bias, v_p, a, b, v_g, v1) -> np.ndarray:
    """Vectorised :func:`drain_voltage` over per-node parameter arrays."""
    v1 = np.ascontiguousarray(v1, dtype=float)
    out = np.empty_like(v1)
    return _drain_array(
        np.ascontiguousarray(v_bias, dtype=float),
        np.ascontiguousarray(v_p, dtype=float),
        np.ascontiguousarray(a, dtype=float),
        np.ascontiguousarray(b, dtype=float),
        np.ascontiguousarray(v_g, dtype=float),
        v1,
        out,
    )
