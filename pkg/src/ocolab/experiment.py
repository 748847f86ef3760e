"""Monte Carlo version of the two-step photodetection experiment.

Each trial draws the initial photon number (an ideal QND readout of the
prepared state), then lets one resonant atom try to absorb a photon. The
absorption is accepted with probability weight(n) / C, where C is the largest
weight over the retained levels, and the accepted trials are read out again.

Randomness: trials are grouped in blocks of ``BLOCK`` consecutive indices and
block b draws from Philox seeded by SeedSequence(seed, spawn_key=(b,)). Any
block can be regenerated on its own, so results do not depend on how blocks
are scheduled.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import xlogy

from .errors import NoAcceptedTrials
from .fock import DEFAULT_TAIL_TOL, StatePrep
from .jumps import JumpModel, jump_weights, predict_pn

BLOCK = 1 << 16
CLASSIFIERS = ("three-way", "exact")
LOW_CONFIDENCE_LLR = 1.92  # half the 95% chi^2_1 quantile


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    prep: StatePrep
    model: JumpModel
    n_trials: int
    seed: int
    classifier: str = "three-way"
    target_accepted: int | None = None
    candidates: tuple[JumpModel, ...] = ()

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.classifier not in CLASSIFIERS:
            raise ValueError(f"classifier must be one of {CLASSIFIERS}")
        if self.target_accepted is not None and self.target_accepted < 1:
            raise ValueError("target_accepted must be >= 1")

    def describe(self) -> dict:
        return {
            "state": self.prep.label(),
            "dim": self.prep.dim,
            "tail_tol": self.prep.tail_tol,
            "model": str(self.model),
            "trials": self.n_trials,
            "seed": self.seed,
            "classifier": self.classifier,
            "target_accepted": self.target_accepted,
            "candidates": [str(c) for c in self.candidates],
        }


@dataclass(frozen=True)
class TrialRecord:
    n_initial: int
    absorbed: bool
    n_final: int | None = None


def rejection_constant(model: JumpModel, d: int) -> float:
    """Largest jump weight over levels 1..d-1."""
    return float(jump_weights(model, np.arange(1, d)).max())


def acceptance_probabilities(model: JumpModel, d: int) -> np.ndarray:
    c = rejection_constant(model, d)
    w = jump_weights(model, np.arange(d))
    return w / c if c > 0 else np.zeros(d)


def final_photon_number(model: JumpModel, n):
    # the N model counts without removing a photon
    return n if model.tag == "N" else n - 1


def _sampling_cdf(chi):
    cdf = np.cumsum(chi)
    return cdf / cdf[-1]


def sample_initial(prep, rng: np.random.Generator, size=None):
    """Draw photon numbers from the prepared state's distribution, renormalized over the basis.

    ``prep`` may be a StatePrep or an already prepared DensityMatrix. Returns an
    int, or an array when ``size`` is given.
    """
    rho = prep.prepare() if isinstance(prep, StatePrep) else prep
    cdf = _sampling_cdf(rho.chi)
    n = np.minimum(np.searchsorted(cdf, rng.random(size), side="right"), cdf.size - 1)
    return int(n) if size is None else n


def absorption_trial(model: JumpModel, n: int, rng: np.random.Generator, dim: int) -> TrialRecord:
    """One resonant-atom transit through a field holding ``n`` photons."""
    if n < 0 or n >= dim:
        raise ValueError(f"photon number {n} outside [0, {dim})")
    p = acceptance_probabilities(model, dim)[n]
    if n >= 1 and rng.random() < p:
        return TrialRecord(n, True, int(final_photon_number(model, n)))
    return TrialRecord(n, False, None)


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


@dataclass(frozen=True)
class EstimateReport:
    config: dict
    dim: int
    trials: int
    accepted: int
    rejection_constant: float
    acceptance_rate: float
    chi0_hat: float
    chi0_se: float
    chi1_hat: float
    chi1_se: float
    p0_hat: float
    p0_se: float
    p1_hat: float
    p1_se: float
    multi_photon_fraction: float
    initial_counts: dict = field(default_factory=dict)
    final_counts: dict = field(default_factory=dict)

    def final_three_way(self) -> tuple[int, int, int]:
        c0 = self.final_counts.get("0", 0)
        c1 = self.final_counts.get("1", 0)
        return c0, c1, self.accepted - c0 - c1

    def to_dict(self) -> dict:
        return asdict(self)

    def to_text(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "EstimateReport":
        return cls(**data)

    CSV_FIELDS = ("state", "model", "seed", "trials", "accepted", "acceptance_rate",
                  "chi0_hat", "chi0_se", "chi1_hat", "chi1_se", "p0_hat", "p0_se", "p1_hat", "p1_se")

    def csv_row(self) -> str:
        vals = [self.config["state"], self.config["model"], self.config["seed"], self.trials, self.accepted]
        vals += [getattr(self, k) for k in self.CSV_FIELDS[5:]]
        return ",".join(v if isinstance(v, str) else (f"{v:.17g}" if isinstance(v, float) else str(v)) for v in vals)


def _binomial(k, n):
    p = k / n
    return p, math.sqrt(p * (1 - p) / n)


def _class_counts(hist, classifier):
    if classifier == "exact":
        return {str(i): int(c) for i, c in enumerate(hist) if c}
    return {"0": int(hist[0]), "1": int(hist[1]), "2+": int(hist[2:].sum())}


def run_experiment(config: ExperimentConfig) -> EstimateReport:
    """Simulate ``config.n_trials`` trials (or stop at ``target_accepted`` absorptions)."""
    rho = config.prep.prepare()
    d = rho.dim
    cdf = _sampling_cdf(rho.chi)
    accept_p = acceptance_probabilities(config.model, d)
    n_shift = 0 if config.model.tag == "N" else 1

    init_hist = np.zeros(d, dtype=np.int64)
    final_hist = np.zeros(d, dtype=np.int64)
    done = accepted = 0
    block = 0
    while done < config.n_trials:
        size = min(BLOCK, config.n_trials - done)
        u = block_rng(config.seed, block).random((2, BLOCK))[:, :size]
        n0 = np.minimum(np.searchsorted(cdf, u[0], side="right"), d - 1)
        acc = u[1] < accept_p[n0]
        if config.target_accepted is not None:
            need = config.target_accepted - accepted
            hits = np.flatnonzero(acc)
            if hits.size >= need:
                size = int(hits[need - 1]) + 1
                n0, acc = n0[:size], acc[:size]
        init_hist += np.bincount(n0, minlength=d)
        final_hist += np.bincount(n0[acc] - n_shift, minlength=d)
        accepted += int(acc.sum())
        done += size
        block += 1
        if config.target_accepted is not None and accepted >= config.target_accepted:
            break
    if accepted == 0:
        raise NoAcceptedTrials(f"no absorption in {done} trials")

    chi0, chi0_se = _binomial(init_hist[0], done)
    chi1, chi1_se = _binomial(init_hist[1], done)
    p0, p0_se = _binomial(final_hist[0], accepted)
    p1, p1_se = _binomial(final_hist[1], accepted)
    return EstimateReport(
        config=config.describe(),
        dim=d,
        trials=done,
        accepted=accepted,
        rejection_constant=rejection_constant(config.model, d),
        acceptance_rate=accepted / done,
        chi0_hat=chi0, chi0_se=chi0_se,
        chi1_hat=chi1, chi1_se=chi1_se,
        p0_hat=p0, p0_se=p0_se,
        p1_hat=p1, p1_se=p1_se,
        multi_photon_fraction=float(init_hist[2:].sum() / done),
        initial_counts=_class_counts(init_hist, config.classifier),
        final_counts=_class_counts(final_hist, config.classifier),
    )


# -- model discrimination -------------------------------------------------------


@dataclass(frozen=True)
class DiscriminationResult:
    counts: tuple[int, int, int]
    candidates: tuple[str, ...]
    log_likelihoods: tuple[float, ...]
    ranking: tuple[str, ...]
    best_model: str
    log_likelihood_ratios: dict
    degenerate: tuple[str, ...]
    low_confidence: bool

    def to_text(self) -> str:
        d = asdict(self)
        d["log_likelihoods"] = [x if np.isfinite(x) else "-inf" for x in self.log_likelihoods]
        d["log_likelihood_ratios"] = {
            k: v if np.isfinite(v) else "inf" for k, v in self.log_likelihood_ratios.items()
        }
        return json.dumps(d, indent=2) + "\n"


def discriminate(report: EstimateReport, chi, candidates) -> DiscriminationResult:
    """Rank candidate models by the multinomial likelihood of the post-count (0, 1, >=2) tallies.

    The multinomial coefficient is common to all candidates and omitted. A
    candidate that assigns zero probability to an observed class gets -inf and
    is listed in ``degenerate``.
    """
    if report.accepted < 1:
        raise NoAcceptedTrials("report has no accepted trials")
    candidates = list(candidates)
    if not candidates:
        raise ValueError("need at least one candidate model")
    counts = np.array(report.final_three_way(), dtype=float)
    lls, degenerate = [], []
    for model in candidates:
        p0 = predict_pn(model, chi, 0)
        p1 = predict_pn(model, chi, 1)
        probs = np.array([p0, p1, max(1.0 - p0 - p1, 0.0)])
        if np.any((probs == 0) & (counts > 0)):
            lls.append(-np.inf)
            degenerate.append(str(model))
        else:
            lls.append(float(xlogy(counts, probs).sum()))
    order = sorted(range(len(candidates)), key=lambda i: -lls[i])
    best = order[0]
    ratios = {str(candidates[i]): lls[best] - lls[i] for i in order[1:]}
    if len(order) > 1:
        margin = lls[best] - lls[order[1]]
        low_conf = bool(not np.isfinite(lls[best]) or margin < LOW_CONFIDENCE_LLR)
    else:
        low_conf = True
    return DiscriminationResult(
        counts=tuple(int(c) for c in counts),
        candidates=tuple(str(c) for c in candidates),
        log_likelihoods=tuple(lls),
        ranking=tuple(str(candidates[i]) for i in order),
        best_model=str(candidates[best]),
        log_likelihood_ratios=ratios,
        degenerate=tuple(degenerate),
        low_confidence=low_conf,
    )


# -- config files ---------------------------------------------------------------

CONFIG_KEYS = {
    "state": "initial field, e.g. thermal:nbar=0.7, thermal:chi0=0.6, coherent:alpha=1, fock:n=1",
    "model": "detector physics being simulated: A, E, N, H(y) or Beta(b)",
    "trials": "number of trials (upper bound when target_accepted is set)",
    "classifier": "QND readout classes: three-way (0, 1, >=2) or exact",
    "target_accepted": "optional; stop once this many absorptions occurred",
    "candidates": "optional comma-separated models to rank against the data",
    "dim": "optional explicit Fock truncation",
    "tail_tol": "optional truncation tail tolerance (default 1e-12)",
}


def parse_config(text: str, seed: int, source="<config>") -> ExperimentConfig:
    """Parse the ``key = value`` experiment file; see CONFIG_KEYS for the schema.

    Blank lines and ``#`` comments are ignored. Errors name the line and field.
    """
    raw = {}
    lines = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        key = key.strip()
        if not eq or not key:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown field {key!r}")
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: duplicate field {key!r}")
        raw[key] = value.strip()
        lines[key] = lineno

    def fail(key, msg):
        raise ConfigError(f"{source}:{lines.get(key, 0)}: field {key!r}: {msg}")

    for key in ("state", "model", "trials"):
        if key not in raw:
            raise ConfigError(f"{source}: missing required field {key!r}")
    try:
        dim = int(raw["dim"]) if "dim" in raw else None
    except ValueError as exc:
        fail("dim", exc)
    try:
        tail_tol = float(raw.get("tail_tol", DEFAULT_TAIL_TOL))
    except ValueError as exc:
        fail("tail_tol", exc)
    try:
        prep = StatePrep.parse(raw["state"], dim=dim, tail_tol=tail_tol)
    except ValueError as exc:
        fail("state", exc)
    try:
        model = JumpModel.parse(raw["model"])
    except ValueError as exc:
        fail("model", exc)
    try:
        trials = int(raw["trials"])
        if trials < 1:
            raise ValueError("must be >= 1")
    except ValueError as exc:
        fail("trials", exc)
    target = None
    if "target_accepted" in raw:
        try:
            target = int(raw["target_accepted"])
            if target < 1:
                raise ValueError("must be >= 1")
        except ValueError as exc:
            fail("target_accepted", exc)
    classifier = raw.get("classifier", "three-way")
    if classifier not in CLASSIFIERS:
        fail("classifier", f"expected one of {CLASSIFIERS}")
    candidates = ()
    if raw.get("candidates"):
        try:
            candidates = tuple(JumpModel.parse(c) for c in raw["candidates"].split(",") if c.strip())
        except ValueError as exc:
            fail("candidates", exc)
    return ExperimentConfig(prep, model, trials, seed, classifier, target, candidates)

