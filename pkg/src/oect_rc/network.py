"""Random device populations, resistor-network topologies and coupling matrices."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from oect_rc.device import OectParams

PARAM_FIELDS = ("v_bias", "v_p", "r", "r_g", "c_g", "k_p", "w", "l")


@dataclass(frozen=True)
class ParamDistributions:
    """Mean and standard deviation of every device parameter.

    Defaults are the fabrication statistics used throughout the experiments.
    A zero standard deviation pins the parameter to its mean.
    """

    v_bias: tuple[float, float] = (-0.5, 0.0)
    v_p: tuple[float, float] = (-0.6, 0.0)
    r: tuple[float, float] = (500.0, 100.0)
    r_g: tuple[float, float] = (2.7e4, 2.7e3)
    c_g: tuple[float, float] = (8.98e-7, 8.98e-8)
    k_p: tuple[float, float] = (5.82e-4, 5.82e-5)
    w: tuple[float, float] = (1.01e-4, 0.0)
    l: tuple[float, float] = (2.0e-4, 0.0)

    def __post_init__(self):
        for name in PARAM_FIELDS:
            mean, std = getattr(self, name)
            if std < 0:
                raise ValueError(f"{name}: standard deviation must be >= 0")
            if std > 0 and mean <= 0:
                raise ValueError(
                    f"{name}: gamma sampling needs a positive mean (got {mean}, std {std})"
                )
            if name not in ("v_bias", "v_p") and mean <= 0:
                raise ValueError(f"{name}: mean must be positive")

    def with_mean(self, name: str, mean: float) -> "ParamDistributions":
        _, std = getattr(self, name)
        return dataclasses.replace(self, **{name: (float(mean), std)})

    def as_dict(self) -> dict:
        return {name: list(getattr(self, name)) for name in PARAM_FIELDS}

    @classmethod
    def from_dict(cls, d: dict) -> "ParamDistributions":
        unknown = set(d) - set(PARAM_FIELDS)
        if unknown:
            raise ValueError(f"unknown device parameters: {sorted(unknown)}")
        return cls(**{k: (float(v[0]), float(v[1])) for k, v in d.items()})


@dataclass(frozen=True)
class DeviceArray:
    """Per-node device parameters stored column-wise (one array per field)."""

    v_bias: np.ndarray
    v_p: np.ndarray
    r: np.ndarray
    r_g: np.ndarray
    c_g: np.ndarray
    k_p: np.ndarray
    w: np.ndarray
    l: np.ndarray

    def __len__(self):
        return self.v_bias.shape[0]

    def __getitem__(self, i) -> OectParams:
        return OectParams(**{k: float(getattr(self, k)[i]) for k in PARAM_FIELDS})

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @classmethod
    def from_params(cls, params: Iterable[OectParams]) -> "DeviceArray":
        params = list(params)
        return cls(
            **{k: np.array([getattr(p, k) for p in params], dtype=float) for k in PARAM_FIELDS}
        )

    @property
    def a(self) -> np.ndarray:
        return self.r / (2.0 * self.r_g)

    @property
    def b(self) -> np.ndarray:
        return self.k_p * self.w * self.r / self.l

    @property
    def tau(self) -> np.ndarray:
        return self.r_g * self.c_g


def sample_device_array(
    spec: ParamDistributions, n: int, rng: np.random.Generator
) -> DeviceArray:
    """Draw ``n`` devices, each parameter from a moment-matched gamma law.

    shape = mean**2 / std**2 and scale = std**2 / mean; parameters with zero
    spread are set to the mean exactly.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    columns = {}
    for name in PARAM_FIELDS:
        mean, std = getattr(spec, name)
        if std == 0:
            columns[name] = np.full(n, float(mean))
        else:
            columns[name] = rng.gamma(mean**2 / std**2, std**2 / mean, size=n)
    return DeviceArray(**columns)


@dataclass(frozen=True)
class ResistorNetwork:
    """Weighting resistors ``r_w[n, m]`` from the drain of m to the gate of n.

    Absent edges carry infinite resistance.
    """

    r_w: np.ndarray
    r_g: np.ndarray

    def __post_init__(self):
        n = self.r_w.shape[0]
        if self.r_w.shape != (n, n) or self.r_g.shape != (n,):
            raise ValueError("r_w must be n x n and r_g length n")
        if np.any(np.isfinite(np.diag(self.r_w))):
            raise ValueError("self-loops are not allowed")
        if np.any(self.r_w <= 0) or np.any(self.r_g <= 0):
            raise ValueError("resistances must be positive")

    @property
    def n(self) -> int:
        return self.r_w.shape[0]

    @property
    def adjacency(self) -> np.ndarray:
        return np.isfinite(self.r_w)


def sample_topology(
    n: int,
    p: float,
    rng: np.random.Generator,
    r_low: float = 100.0,
    r_high: float = 500.0,
    r_g: Sequence[float] | float = 2.7e4,
) -> ResistorNetwork:
    """Directed Erdos-Renyi graph without self-loops, uniform edge resistances.

    Both random matrices are always drawn in full, so the generator advances
    by the same amount for every ``p``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if not 0.0 < r_low <= r_high:
        raise ValueError("need 0 < r_low <= r_high")
    present = rng.random((n, n)) < p
    np.fill_diagonal(present, False)
    values = rng.uniform(r_low, r_high, size=(n, n))
    r_w = np.where(present, values, np.inf)
    r_g = np.broadcast_to(np.asarray(r_g, dtype=float), (n,)).copy()
    return ResistorNetwork(r_w=r_w, r_g=r_g)


@dataclass(frozen=True)
class CouplingMatrix:
    a: np.ndarray
    f: np.ndarray
    s: np.ndarray
    leak_neglected: bool = True

    @property
    def n(self) -> int:
        return self.a.shape[0]


def effective_coupling(net: ResistorNetwork, leak_neglected: bool = True) -> CouplingMatrix:
    """Kirchhoff weights of each node's gate voltage.

    ``s[n] = 1/R_G[n] + sum_m 1/R_w[n, m]`` (the gate-leak term is dropped when
    ``leak_neglected``), ``a[n, m] = 1 / (R_w[n, m] s[n])`` and
    ``f[n] = 1 / (R_G[n] s[n])``. A node with no in-edges and no leak gets an
    all-zero row.
    """
    g = 1.0 / net.r_w  # inf -> 0 conductance
    leak = np.zeros(net.n) if leak_neglected else 1.0 / net.r_g
    s = leak + g.sum(axis=1)
    connected = s > 0
    inv_s = np.zeros_like(s)
    inv_s[connected] = 1.0 / s[connected]
    a = g * inv_s[:, None]
    f = leak * inv_s
    return CouplingMatrix(a=a, f=f, s=s, leak_neglected=leak_neglected)


def sample_input_matrix(
    n: int, d: int, sigma: float, rng: np.random.Generator
) -> np.ndarray:
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    return rng.uniform(-sigma, sigma, size=(n, d))


def spectral_radius(a: np.ndarray, iters: int = 500, seed: int = 0) -> float:
    """Estimate the spectral radius by power iteration.

    A dominant complex-conjugate pair is handled by fitting the two-term
    recurrence ``A^2 v = c1 A v + c0 v`` on the converged Krylov vectors.
    """
    a = np.asarray(a, dtype=float)
    v = np.random.default_rng(seed).random(a.shape[0]) + 0.5
    for _ in range(iters):
        w = a @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
    w = a @ v
    z = a @ w
    lam = v @ w
    if np.linalg.norm(w - lam * v) <= 1e-12 * max(np.linalg.norm(w), 1e-300):
        return float(abs(lam))
    basis = np.column_stack([w, v])
    (c1, c0), *_ = np.linalg.lstsq(basis, z, rcond=None)
    roots = np.roots([1.0, -c1, -c0])
    return float(np.max(np.abs(roots)))
