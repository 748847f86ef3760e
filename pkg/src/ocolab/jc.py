"""Brute-force check of the H model through resonant Jaynes-Cummings evolution.

The joint atom-field space uses the ordering |g,0>, ..., |g,d-1>, |e,0>, ...,
|e,d-1>. The atom enters in |g>, the pair evolves for a dimensionless time
y = g t, and the field is read off conditioned on finding the atom in |e>.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroJumpWeight
from .fock import DensityMatrix
from .jumps import JUMP_EPS, JumpOutcome, H, apply_jump

METHODS = ("analytic", "series")


@dataclass(frozen=True)
class JCParams:
    y: float
    method: str = "analytic"
    tol: float = 1e-13

    def __post_init__(self):
        if not (np.isfinite(self.y) and self.y > 0):
            raise ValueError(f"y must be finite and > 0, got {self.y}")
        if self.method not in METHODS:
            raise ValueError(f"unknown construction {self.method!r}")
        if self.method == "series" and not 0 < self.tol <= 1e-12:
            raise ValueError("series tolerance must lie in (0, 1e-12]")


def _as_params(y_or_params, method="analytic"):
    if isinstance(y_or_params, JCParams):
        return y_or_params
    return JCParams(float(y_or_params), method)


def jc_coupling(d: int) -> np.ndarray:
    """Dimensionless resonant coupling sum_n sqrt(n) (|e,n-1><g,n| + h.c.)."""
    if d < 2:
        raise ValueError(f"field dimension must be >= 2, got {d}")
    h = np.zeros((2 * d, 2 * d))
    n = np.arange(1, d)
    h[d + n - 1, n] = np.sqrt(n)
    h[n, d + n - 1] = np.sqrt(n)
    return h


def _expm_taylor(a: np.ndarray, tol: float) -> np.ndarray:
    """exp(a) by scaling and squaring around a truncated Taylor series."""
    norm = np.linalg.norm(a, 1)
    s = max(0, int(np.ceil(np.log2(norm / 0.5))) if norm > 0.5 else 0)
    a = a / 2.0**s
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    k = 0
    while True:
        k += 1
        term = term @ a / k
        out = out + term
        if np.linalg.norm(term, 1) < tol * 2.0**-s:
            break
        if k > 200:
            raise RuntimeError("Taylor series failed to converge")
    for _ in range(s):
        out = out @ out
    return out


def jc_unitary(params, d: int) -> np.ndarray:
    """Interaction propagator exp(-i y H_c) on the truncated joint space.

    The block {|g,n>, |e,n-1>} rotates with cos(y sqrt n) on the diagonal and
    -i sin(y sqrt n) off it; |g,0> and the top level |e,d-1> are left alone,
    which keeps the truncated propagator exactly unitary.
    """
    p = _as_params(params)
    if d < 2:
        raise ValueError(f"field dimension must be >= 2, got {d}")
    if p.method == "series":
        return _expm_taylor(-1j * p.y * jc_coupling(d), p.tol)
    u = np.zeros((2 * d, 2 * d), dtype=complex)
    u[0, 0] = 1.0
    u[2 * d - 1, 2 * d - 1] = 1.0
    n = np.arange(1, d)
    c = np.cos(p.y * np.sqrt(n))
    s = np.sin(p.y * np.sqrt(n))
    g, e = n, d + n - 1
    u[g, g] = c
    u[e, e] = c
    u[e, g] = -1j * s
    u[g, e] = -1j * s
    return u


def evolve_joint(params, rho: DensityMatrix) -> np.ndarray:
    d = rho.dim
    joint = np.zeros((2 * d, 2 * d), dtype=complex)
    joint[:d, :d] = rho.elements
    u = jc_unitary(params, d)
    return u @ joint @ u.conj().T


def detection_probabilities(params, rho: DensityMatrix) -> tuple[float, float]:
    """(P(atom found in g), P(atom found in e)) after the transit."""
    d = rho.dim
    out = evolve_joint(params, rho)
    diag = out.diagonal().real
    return float(diag[:d].sum()), float(diag[d:].sum())


def conditioned_field_state(params, rho: DensityMatrix) -> JumpOutcome:
    """Field state given the atom left excited; ``norm`` is the excitation probability."""
    d = rho.dim
    out = evolve_joint(params, rho)
    field = out[d:, d:]
    norm = float(field.diagonal().real.sum())
    if not norm > JUMP_EPS:
        raise ZeroJumpWeight(norm, JUMP_EPS)
    field = field / norm
    field = 0.5 * (field + field.conj().T)
    p = _as_params(params)
    return JumpOutcome(DensityMatrix(field, 0.0, "jc_conditioned", {"y": p.y}), norm)


def excitation_probability(params, rho: DensityMatrix) -> float:
    """sum_n sin^2(y sqrt n) chi_n."""
    p = _as_params(params)
    n = np.arange(rho.dim)
    return float(np.sin(p.y * np.sqrt(n)) ** 2 @ rho.chi)


@dataclass(frozen=True)
class OracleRow:
    state: str
    y: float
    max_deviation: float | None
    norm_deviation: float | None
    status: str


def compare(y, rho: DensityMatrix, label="", method="analytic") -> OracleRow:
    """H-model jump versus JC-conditioned field for one state and one y."""
    try:
        oracle = conditioned_field_state(JCParams(float(y), method), rho)
        model = apply_jump(H(y), rho)
    except ZeroJumpWeight:
        return OracleRow(label, float(y), None, None, "zero-weight")
    dev = float(np.max(np.abs(oracle.state.elements - model.state.elements)))
    return OracleRow(label, float(y), dev, abs(oracle.norm - model.norm), "ok")


def oracle_report(states, ys, method="analytic") -> list[OracleRow]:
    """``states`` is an iterable of (label, DensityMatrix) pairs."""
    return [compare(y, rho, label, method) for label, rho in states for y in ys]


def format_oracle_table(rows) -> str:
    lines = [f"{'state':<32} {'y':>10} {'max_dev':>12} {'norm_dev':>12}  status"]
    for r in rows:
        dev = "-" if r.max_deviation is None else f"{r.max_deviation:.3e}"
        ndev = "-" if r.norm_deviation is None else f"{r.norm_deviation:.3e}"
        lines.append(f"{r.state:<32} {r.y:>10.6g} {dev:>12} {ndev:>12}  {r.status}")
    return "\n".join(lines) + "\n"
