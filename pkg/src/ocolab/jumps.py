"""One-count operators and the post-detection photon statistics they predict.

Every model except N subtracts one photon through a lowering operator that is
diagonal in weight, O|n> = w[n] |n-1>:

    A        w[n] = sqrt(n)              (O = a)
    E        w[n] = 1                    (O = (1+n)^(-1/2) a)
    H(y)     w[n] = sin(y sqrt(n))       (Jaynes-Cummings absorption, y = g t)
    Beta(b)  w[n] = n^(1/2 - b)          (O = (1+n)^(-b) a)

The N model maps rho to n rho n and keeps the photon number.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import ZeroJumpWeight
from .fock import DensityMatrix, PhotonStatistics

JUMP_EPS = 1e-14

_TAGS = ("A", "E", "H", "N", "Beta")


@dataclass(frozen=True)
class JumpModel:
    tag: str
    param: float | None = None

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise ValueError(f"unknown jump model {self.tag!r}")
        if self.tag == "H":
            if self.param is None or not (self.param > 0 and np.isfinite(self.param)):
                raise ValueError(f"H model needs a finite y > 0, got {self.param}")
        elif self.tag == "Beta":
            if self.param is None or not (self.param >= 0 and np.isfinite(self.param)):
                raise ValueError(f"Beta model needs a finite beta >= 0, got {self.param}")
        elif self.param is not None:
            raise ValueError(f"model {self.tag} takes no parameter")

    def __str__(self):
        return self.tag if self.param is None else f"{self.tag}({self.param!r})"

    @classmethod
    def parse(cls, text: str) -> "JumpModel":
        """Inverse of ``str``: ``A``, ``E``, ``N``, ``H(2.0)``, ``Beta(0.25)``."""
        m = re.fullmatch(r"\s*(A|E|N|H|Beta)\s*(?:\(\s*([^)]*?)\s*\))?\s*", text)
        if not m:
            raise ValueError(f"cannot parse jump model {text!r}")
        tag, arg = m.groups()
        if arg is None:
            return cls(tag)
        try:
            return cls(tag, float(arg))
        except ValueError as exc:
            raise ValueError(f"bad jump model {text!r}: {exc}") from None

    @property
    def lowers(self) -> bool:
        return self.tag != "N"


A = JumpModel("A")
E = JumpModel("E")
N = JumpModel("N")


def H(y) -> JumpModel:
    return JumpModel("H", float(y))


def Beta(beta) -> JumpModel:
    return JumpModel("Beta", float(beta))


@dataclass(frozen=True)
class LoweringOperator:
    weights: np.ndarray
    label: str

    @property
    def dim(self):
        return self.weights.size

    def matrix(self) -> np.ndarray:
        """Dense matrix with O[n-1, n] = w[n]."""
        return np.diag(self.weights[1:], k=1).astype(complex)


def _raw_weights(model: JumpModel, n: np.ndarray) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    if model.tag == "A":
        return np.sqrt(n)
    if model.tag == "E":
        return np.ones_like(n)
    if model.tag == "H":
        return np.sin(model.param * np.sqrt(n))
    if model.tag == "Beta":
        with np.errstate(divide="ignore"):
            return n ** (0.5 - model.param)
    raise ValueError(f"model {model} has no lowering operator")


def lowering_operator(model: JumpModel, d: int) -> LoweringOperator:
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if not model.lowers:
        raise ValueError("the N model preserves photon number; it has no lowering operator")
    w = _raw_weights(model, np.arange(d))
    w[0] = 0.0
    return LoweringOperator(w, str(model))


def jump_weights(model: JumpModel, n) -> np.ndarray:
    """Probability weight |<n-1|O|n>|^2 (or n^2 for N) that level n fires a count."""
    n = np.asarray(n)
    if model.tag == "N":
        return n.astype(float) ** 2
    w = np.where(n >= 1, _raw_weights(model, np.maximum(n, 1)), 0.0)
    return w * w


@dataclass(frozen=True)
class JumpOutcome:
    state: DensityMatrix
    norm: float


def apply_jump(model: JumpModel, rho: DensityMatrix) -> JumpOutcome:
    """Normalized post-count state J(rho)/Tr J(rho).

    Raises ``ZeroJumpWeight`` when Tr J(rho) <= JUMP_EPS. The result is the
    exact image of the truncated input, so its tail_mass_bound is zero.
    """
    r = rho.elements
    d = rho.dim
    if model.tag == "N":
        n = np.arange(d, dtype=float)
        out = r * np.outer(n, n)
    else:
        w = lowering_operator(model, d).weights.astype(complex)
        out = np.zeros_like(r)
        out[:-1, :-1] = w[1:, None] * r[1:, 1:] * w[1:].conj()[None, :]
    norm = float(out.diagonal().real.sum())
    if not norm > JUMP_EPS:
        raise ZeroJumpWeight(norm, JUMP_EPS)
    out = out / norm
    out = 0.5 * (out + out.conj().T)
    params = {"model": str(model), "from": rho.kind, **rho.params}
    return JumpOutcome(DensityMatrix(out, 0.0, "jumped", params), norm)


def predict_distribution(model: JumpModel, chi) -> np.ndarray:
    """Closed-form P_n = <n|rho_f|n> for every n representable by ``chi``.

    The formulas are homogeneous in ``chi``: 1 - chi_0 is evaluated as
    sum(chi) - chi_0, which is the same thing for a normalized distribution.
    """
    chi = np.asarray(chi, dtype=float)
    if chi.ndim != 1 or chi.size < 2:
        raise ValueError("chi must be a vector with at least two entries")
    if np.any(chi < 0):
        raise ValueError("chi has negative entries")
    n = np.arange(chi.size, dtype=float)
    if model.tag == "N":
        num = n * n * chi
        den = num.sum()
        if not den > 0:
            raise ValueError("N model undefined: <n^2> = 0")
        return num / den
    out = np.zeros(chi.size)
    if model.tag == "A":
        den = n @ chi
        if not den > 0:
            raise ValueError("A model undefined: <n> = 0")
        out[:-1] = n[1:] * chi[1:] / den
    elif model.tag == "E":
        den = chi.sum() - chi[0]
        if not den > 0:
            raise ValueError("E model undefined: chi_0 = 1")
        out[:-1] = chi[1:] / den
    else:
        w2 = jump_weights(model, np.arange(chi.size))
        den = w2 @ chi
        if not den > 0:
            raise ValueError(f"{model} model undefined: zero excitation weight")
        out[:-1] = w2[1:] * chi[1:] / den
    return out


def predict_pn(model: JumpModel, chi, n: int) -> float:
    if n < 0:
        raise ValueError("photon number must be >= 0")
    p = predict_distribution(model, chi)
    return float(p[n]) if n < p.size else 0.0


def mean_after_jump(model: JumpModel, stats: PhotonStatistics) -> float:
    """Post-count mean photon number from pre-count statistics (A and E only).

    A: <n^2>/<n> - 1, i.e. <n> + Q.   E: <n>/(1 - chi_0) - 1.
    """
    if model.tag == "A":
        if not stats.mean > 0:
            raise ValueError("A model undefined: <n> = 0")
        return stats.second_moment / stats.mean - 1.0
    if model.tag == "E":
        den = stats.trace - stats.chi[0]
        if not den > 0:
            raise ValueError("E model undefined: chi_0 = 1")
        return stats.mean / den - 1.0
    raise ValueError(f"no closed-form post-count mean for model {model}")


def chi0_branches(chi1: float) -> tuple[float, float]:
    """Both thermal vacuum occupations compatible with a one-photon occupation ``chi1``.

    Returns (upper, lower): upper for nbar < 1, lower for nbar > 1.
    """
    if not 0 < chi1 <= 0.25:
        raise ValueError(f"no thermal state has chi_1 = {chi1}; need 0 < chi_1 <= 1/4")
    root = np.sqrt(0.25 - chi1)
    return 0.5 + root, 0.5 - root
