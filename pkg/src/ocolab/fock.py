"""Truncated single-mode Fock space: states, photon statistics and their serialization.

States are stored as dense complex density matrices on the basis |0>, ..., |d-1>.
Preparations are never renormalized after truncation; the probability mass that
falls outside the basis is reported as ``tail_mass_bound`` instead, so analytic
identities can be checked against a known error budget.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.special import gammainc, gammaln

DEFAULT_TAIL_TOL = 1e-12
MAX_DIM = 512
MAX_COHERENT_NBAR = 50.0
MAX_SQUEEZED_NBAR = 25.0

STATE_KINDS = ("thermal", "coherent", "fock", "squeezed_vacuum")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Density matrix on a truncated Fock basis.

    ``elements`` is copied and frozen on construction. ``kind`` and ``params``
    only describe provenance (used by the text record), they carry no physics.
    """

    elements: np.ndarray
    tail_mass_bound: float = 0.0
    kind: str = "custom"
    params: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        rho = np.array(self.elements, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 1:
            raise ValueError(f"density matrix must be square and non-empty, got shape {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise ValueError("density matrix has non-finite entries")
        if self.tail_mass_bound < 0:
            raise ValueError("tail_mass_bound must be >= 0")
        rho.setflags(write=False)
        object.__setattr__(self, "elements", rho)
        object.__setattr__(self, "params", dict(self.params))

    @classmethod
    def from_diagonal(cls, chi, tail_mass_bound=0.0, kind="diagonal", params=None):
        chi = np.asarray(chi, dtype=float)
        return cls(np.diag(chi).astype(complex), tail_mass_bound, kind, params or {})

    @property
    def dim(self) -> int:
        return self.elements.shape[0]

    @property
    def chi(self) -> np.ndarray:
        """Photon-number distribution <n|rho|n>."""
        return self.elements.diagonal().real.copy()

    @property
    def trace(self) -> float:
        return float(self.elements.diagonal().real.sum())

    def check(self, psd=True, herm_tol=1e-12, trace_tol=1e-10, psd_tol=1e-10):
        """Raise ``ValueError`` if any density-matrix invariant fails.

        The trace may fall short of one by at most ``tail_mass_bound``.
        """
        rho = self.elements
        herm_err = np.max(np.abs(rho - rho.conj().T))
        if herm_err > herm_tol:
            raise ValueError(f"not Hermitian: max |rho - rho^H| = {herm_err:.3e}")
        tr = self.trace
        if tr > 1 + trace_tol or tr < 1 - self.tail_mass_bound - trace_tol:
            raise ValueError(f"trace {tr!r} outside [1 - {self.tail_mass_bound:.3e}, 1]")
        if psd:
            lam_min = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
            if lam_min < -psd_tol:
                raise ValueError(f"not positive semidefinite: smallest eigenvalue {lam_min:.3e}")
        return self


@dataclass(frozen=True)
class PhotonStatistics:
    chi: np.ndarray
    mean: float
    second_moment: float
    mandel_q: float | None
    trace: float

    @property
    def variance(self) -> float:
        return self.second_moment - self.mean**2


# -- analytic distributions ---------------------------------------------------


def thermal_chi(nbar, size):
    """Bose-Einstein distribution nbar^n / (nbar+1)^(n+1) for n < size."""
    n = np.arange(size)
    q = nbar / (nbar + 1.0)
    return q**n / (nbar + 1.0)


def poisson_chi(nbar, size):
    n = np.arange(size)
    if nbar == 0:
        return (n == 0).astype(float)
    return np.exp(-nbar + n * np.log(nbar) - gammaln(n + 1))


def squeezed_chi(r, size):
    """Even-only distribution of the squeezed vacuum, computed in log space."""
    chi = np.zeros(size)
    if r == 0:
        chi[0] = 1.0
        return chi
    k = np.arange((size + 1) // 2)
    log_t2 = 2.0 * np.log(np.tanh(r))
    log_p = gammaln(2 * k + 1) - 2 * gammaln(k + 1) - k * np.log(4.0) + k * log_t2 - np.log(np.cosh(r))
    chi[0::2] = np.exp(log_p)
    return chi


# -- truncation ---------------------------------------------------------------


def _poisson_sf(k, lam):
    """P(N >= k) for N ~ Poisson(lam), vectorized in k."""
    k = np.asarray(k)
    out = np.ones(k.shape)
    pos = k > 0
    out[pos] = gammainc(k[pos], lam)
    return out


def _weighted_tails(kind, value, dims):
    """Upper bounds on sum_{n>=d} (1+n)^2 chi_n and sum_{n>=d} chi_n for each d in ``dims``."""
    d = np.asarray(dims, dtype=float)
    if kind == "thermal":
        q = value / (value + 1.0)
        mass = q**d
        moments = mass * ((d + 1) ** 2 + 2 * (d + 1) * q / (1 - q) + q * (1 + q) / (1 - q) ** 2)
        return moments, mass
    if kind == "coherent":
        lam = value
        if lam == 0:
            return np.zeros_like(d), np.zeros_like(d)
        mass = _poisson_sf(d, lam)
        moments = lam**2 * _poisson_sf(d - 2, lam) + 3 * lam * _poisson_sf(d - 1, lam) + mass
        return moments, mass
    if kind == "squeezed_vacuum":
        r = value
        if r == 0:
            return np.zeros_like(d), np.zeros_like(d)
        size = 8 * MAX_DIM
        chi = squeezed_chi(r, size)
        n = np.arange(size)
        weighted = (1.0 + n) ** 2 * chi
        # terms beyond the table shrink at least geometrically
        t2 = np.tanh(r) ** 2
        ratio = t2 * ((size + 2.0) / size) ** 2
        rest_w = weighted[-2] * ratio / (1 - ratio) if ratio < 1 else np.inf
        rest_m = chi[-2] * t2 / (1 - t2)
        tail_w = np.cumsum(weighted[::-1])[::-1] + rest_w
        tail_m = np.cumsum(chi[::-1])[::-1] + rest_m
        idx = d.astype(int)
        return tail_w[idx], tail_m[idx]
    raise ValueError(f"unknown state kind {kind!r}")


def _choose_dim(kind, value, dim, tail_tol):
    """Return (d, tail mass) for an explicit ``dim`` or the smallest d meeting ``tail_tol``.

    In tolerance mode the criterion is the second-moment-weighted tail, which
    also bounds the tail mass and keeps <n>, <n^2> accurate to ``tail_tol``.
    """
    if dim is not None:
        if dim < 2:
            raise ValueError(f"truncation dimension must be >= 2, got {dim}")
        if dim > MAX_DIM:
            raise ValueError(f"truncation dimension {dim} exceeds the cap {MAX_DIM}")
        _, mass = _weighted_tails(kind, value, [dim])
        return int(dim), float(mass[0])
    if not tail_tol > 0:
        raise ValueError("tail tolerance must be positive")
    dims = np.arange(2, MAX_DIM + 1)
    moments, mass = _weighted_tails(kind, value, dims)
    ok = np.flatnonzero(moments <= tail_tol)
    if ok.size == 0:
        raise ValueError(
            f"{kind} state needs more than {MAX_DIM} levels for tail tolerance {tail_tol:g}; "
            "pass an explicit dimension"
        )
    i = ok[0]
    return int(dims[i]), float(mass[i])


# -- preparations -------------------------------------------------------------


def prepare_thermal(nbar, dim=None, tail_tol=DEFAULT_TAIL_TOL):
    """Thermal (Bose-Einstein) state with mean photon number ``nbar``."""
    if not nbar > 0:
        raise ValueError(f"thermal mean photon number must be > 0, got {nbar}")
    d, tail = _choose_dim("thermal", nbar, dim, tail_tol)
    return DensityMatrix.from_diagonal(thermal_chi(nbar, d), tail, "thermal", {"nbar": float(nbar)})


def thermal_nbar_from_chi0(chi0):
    """Mean photon number of the thermal state whose vacuum occupation is ``chi0``."""
    if not 0 < chi0 < 1:
        raise ValueError(f"chi0 must lie in (0, 1), got {chi0}")
    return (1.0 - chi0) / chi0


def prepare_coherent(alpha, dim=None, tail_tol=DEFAULT_TAIL_TOL):
    alpha = complex(alpha)
    nbar = abs(alpha) ** 2
    if nbar > MAX_COHERENT_NBAR:
        raise ValueError(f"|alpha|^2 = {nbar:g} exceeds {MAX_COHERENT_NBAR:g}")
    d, tail = _choose_dim("coherent", nbar, dim, tail_tol)
    n = np.arange(d)
    if nbar == 0:
        amp = (n == 0).astype(complex)
    else:
        log_abs = -nbar / 2 + n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1)
        amp = np.exp(log_abs + 1j * n * np.angle(alpha))
    params = {"alpha_re": alpha.real, "alpha_im": alpha.imag}
    return DensityMatrix(np.outer(amp, amp.conj()), tail, "coherent", params)


def prepare_fock(n, dim=None, tail_tol=DEFAULT_TAIL_TOL):
    if int(n) != n or n < 0:
        raise ValueError(f"Fock index must be a non-negative integer, got {n}")
    n = int(n)
    d = max(n + 1, 2) if dim is None else dim
    if d < 2:
        raise ValueError(f"truncation dimension must be >= 2, got {d}")
    if n >= d:
        raise ValueError(f"Fock index {n} does not fit in dimension {d}")
    if d > MAX_DIM:
        raise ValueError(f"truncation dimension {d} exceeds the cap {MAX_DIM}")
    chi = np.zeros(d)
    chi[n] = 1.0
    return DensityMatrix.from_diagonal(chi, 0.0, "fock", {"n": n})


def prepare_squeezed_vacuum(r, dim=None, tail_tol=DEFAULT_TAIL_TOL):
    """Squeezed vacuum S(r)|0> with real squeeze parameter ``r >= 0``."""
    if r < 0 or np.sinh(r) ** 2 > MAX_SQUEEZED_NBAR:
        raise ValueError(f"squeeze parameter r={r} outside [0, asinh(5)]")
    d, tail = _choose_dim("squeezed_vacuum", r, dim, tail_tol)
    chi = squeezed_chi(r, d)
    amp = np.sqrt(chi).astype(complex)
    amp[2::4] *= -1.0  # (-tanh r)^k for k odd
    return DensityMatrix(np.outer(amp, amp.conj()), tail, "squeezed_vacuum", {"r": float(r)})


@dataclass(frozen=True)
class StatePrep:
    """Recipe for a prepared state: kind, its parameter, and the truncation policy.

    ``value`` is nbar (thermal), alpha (coherent), n (fock) or r (squeezed_vacuum).
    """

    kind: str
    value: complex | float | int
    dim: int | None = None
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        if self.kind not in STATE_KINDS:
            raise ValueError(f"unknown state kind {self.kind!r}; expected one of {STATE_KINDS}")

    def prepare(self) -> DensityMatrix:
        fn = {
            "thermal": prepare_thermal,
            "coherent": prepare_coherent,
            "fock": prepare_fock,
            "squeezed_vacuum": prepare_squeezed_vacuum,
        }[self.kind]
        return fn(self.value, dim=self.dim, tail_tol=self.tail_tol)

    @classmethod
    def parse(cls, text, dim=None, tail_tol=DEFAULT_TAIL_TOL):
        """Parse ``kind:key=value`` strings such as ``thermal:nbar=0.7``.

        Accepted keys: thermal ``nbar`` or ``chi0``; coherent ``alpha`` (complex
        literal, e.g. ``1+0.5j``); fock ``n``; squeezed ``r``. ``vacuum`` is a
        shorthand for ``fock:n=0``.
        """
        text = text.strip()
        if text == "vacuum":
            return cls("fock", 0, dim, tail_tol)
        kind, sep, rest = text.partition(":")
        kind = {"squeezed": "squeezed_vacuum"}.get(kind, kind)
        key, eq, raw = rest.partition("=")
        if not sep or not eq:
            raise ValueError(f"state spec {text!r} is not of the form kind:key=value")
        key = key.strip()
        try:
            if kind == "thermal" and key == "nbar":
                return cls(kind, float(raw), dim, tail_tol)
            if kind == "thermal" and key == "chi0":
                return cls(kind, thermal_nbar_from_chi0(float(raw)), dim, tail_tol)
            if kind == "coherent" and key == "alpha":
                return cls(kind, complex(raw.replace(" ", "")), dim, tail_tol)
            if kind == "fock" and key == "n":
                return cls(kind, int(raw), dim, tail_tol)
            if kind == "squeezed_vacuum" and key == "r":
                return cls(kind, float(raw), dim, tail_tol)
        except ValueError as exc:
            raise ValueError(f"bad value in state spec {text!r}: {exc}") from None
        raise ValueError(f"unsupported state spec {text!r}")

    def label(self) -> str:
        if self.kind == "coherent":
            return f"coherent:alpha={complex(self.value)!r}".replace("(", "").replace(")", "")
        key = {"thermal": "nbar", "fock": "n", "squeezed_vacuum": "r"}[self.kind]
        return f"{self.kind}:{key}={self.value!r}"


# -- statistics ---------------------------------------------------------------


def photon_statistics(rho: DensityMatrix) -> PhotonStatistics:
    """Occupations, first two moments and Mandel's Q of ``rho``.

    Moments are raw sums over the truncated basis (no division by the trace).
    Q is ``None`` for states without photons.
    """
    chi = rho.chi
    n = np.arange(rho.dim, dtype=float)
    mean = float(n @ chi)
    second = float((n * n) @ chi)
    q = (second - mean**2) / mean - 1.0 if mean > 0 else None
    return PhotonStatistics(chi, mean, second, q, float(chi.sum()))


def absorption_rate(rho: DensityMatrix, gamma=1.0) -> float:
    """Photon absorption probability per unit time, gamma * Tr(a rho a^dag)."""
    if not gamma > 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    return gamma * photon_statistics(rho).mean


# -- serialization ------------------------------------------------------------


def state_record(rho: DensityMatrix) -> dict:
    return {
        "kind": rho.kind,
        "parameters": dict(rho.params),
        "dim": rho.dim,
        "tail_mass_bound": rho.tail_mass_bound,
        "chi": rho.chi.tolist(),
    }


def dumps_record(record) -> str:
    return json.dumps(record, indent=2, sort_keys=False) + "\n"


def write_chi_csv(path, chi):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "chi_n"])
        for i, p in enumerate(chi):
            w.writerow([i, f"{p:.17g}"])


def read_chi_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["n", "chi_n"]:
        raise ValueError(f"{path}: expected header 'n,chi_n'")
    idx = [int(r[0]) for r in rows[1:]]
    if idx != list(range(len(idx))):
        raise ValueError(f"{path}: photon numbers must run 0, 1, 2, ...")
    return np.array([float(r[1]) for r in rows[1:]])
