"""Synthetic wide binary data with a known disjunction-of-conjunctions truth.

A scenario fixes n, p, a DNF over column indices (all positive literals,
terms pairwise disjoint in the built-ins) and per-column Bernoulli
parameters.  The response is deterministic: y = 1 exactly when some term
has all its columns equal to 1.

Two calibrations keep cases and controls balanced:

* ``calibrate`` -- one common probability q for every relevant column,
  found by bisection on  1 - prod_t (1 - q^|t|) = target.
* ``calibrate_per_term`` -- every term fires with the same probability
  pi = 1 - (1 - target)^(1/T), columns of a size-s term get pi^(1/s).
  This is the built-in scenarios' default: it keeps each conjunction,
  whatever its order, carrying a comparable share of the signal.

Replicate r of a seeded study uses the derived seed ``seed ^ r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset

BISECTION_TOL = 1e-10

BUILTIN_DNFS = {
    1: ((0,), (1,), (2,), (3,), (4,), (5,), (6,), (7,), (8,), (9,)),
    2: ((0, 1, 2), (3, 4, 5), (6, 7), (8,), (9,)),
    3: ((0, 1, 2, 3), (4, 5, 6), (7, 8), (9,)),
}


@dataclass
class ScenarioSpec:
    n: int
    p: int
    dnf: tuple[tuple[int, ...], ...]
    probs: np.ndarray
    seed: int = 0
    flip_prob: float = 0.0  # chance of flipping a positive label to 0; off by default

    def __post_init__(self):
        if self.n < 1 or self.p < 1:
            raise ValueError(f"need n >= 1 and p >= 1, got n={self.n}, p={self.p}")
        self.dnf = tuple(tuple(int(v) for v in term) for term in self.dnf)
        for term in self.dnf:
            if len(term) == 0:
                raise ValueError("empty conjunction in dnf")
            for v in term:
                if not 0 <= v < self.p:
                    raise ValueError(f"dnf index {v} out of range [0, {self.p})")
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.shape != (self.p,):
            raise ValueError(f"probs must have shape ({self.p},), got {probs.shape}")
        if np.any(probs <= 0.0) or np.any(probs >= 1.0):
            raise ValueError("probs must lie strictly inside (0, 1)")
        if not 0.0 <= self.flip_prob < 1.0:
            raise ValueError(f"flip_prob must be in [0, 1), got {self.flip_prob}")
        self.probs = probs

    @property
    def relevant(self) -> np.ndarray:
        """Sorted indices of all columns appearing in some term."""
        return np.unique([v for term in self.dnf for v in term])


def _check_disjoint(dnf) -> None:
    seen: set[int] = set()
    for term in dnf:
        for v in term:
            if v in seen:
                raise ValueError(
                    "terms share variables; automatic calibration needs "
                    "pairwise-disjoint terms — pass explicit probs instead"
                )
            seen.add(v)


def dnf_prevalence(dnf, q: float) -> float:
    """P(y = 1) when every relevant column is Bernoulli(q) and terms are disjoint."""
    out = 1.0
    for term in dnf:
        out *= 1.0 - q ** len(term)
    return 1.0 - out


def calibrate(dnf, target_prevalence: float = 0.5) -> float:
    """Common success probability for all relevant columns hitting the target.

    Bisection on (0, 1) to within 1e-10; requires pairwise-disjoint terms
    (otherwise the closed-form prevalence does not hold).
    """
    if not 0.0 < target_prevalence < 1.0:
        raise ValueError(f"target prevalence must be in (0, 1), got {target_prevalence}")
    _check_disjoint(dnf)
    lo, hi = 0.0, 1.0
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if dnf_prevalence(dnf, mid) < target_prevalence:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def calibrate_per_term(dnf, target_prevalence: float = 0.5) -> dict[int, float]:
    """Per-term-size probabilities giving every term the same firing chance.

    Returns {term size: column probability}; prevalence is exactly the
    target under disjointness.
    """
    if not 0.0 < target_prevalence < 1.0:
        raise ValueError(f"target prevalence must be in (0, 1), got {target_prevalence}")
    _check_disjoint(dnf)
    pi = 1.0 - (1.0 - target_prevalence) ** (1.0 / len(dnf))
    return {s: pi ** (1.0 / s) for s in sorted({len(t) for t in dnf})}


def _probs_for(dnf, p: int, calibration: str, target: float) -> np.ndarray:
    probs = np.full(p, 0.5)
    if calibration == "uniform":
        q = calibrate(dnf, target)
        for term in dnf:
            for v in term:
                probs[v] = q
    elif calibration == "per-term":
        qmap = calibrate_per_term(dnf, target)
        for term in dnf:
            for v in term:
                probs[v] = qmap[len(term)]
    else:
        raise ValueError(f"calibration must be 'per-term' or 'uniform', got {calibration!r}")
    return probs


def builtin_scenario(
    scenario_id: int,
    n: int,
    p: int,
    seed: int = 0,
    calibration: str = "per-term",
    target_prevalence: float = 0.5,
) -> ScenarioSpec:
    """One of the three built-in ground truths over the first 10 columns.

    1. ten single-column conditions
    2. two 3-column, one 2-column and two single-column conditions
    3. one 4-column, one 3-column, one 2-column and one single-column condition
    """
    if scenario_id not in BUILTIN_DNFS:
        raise ValueError(f"scenario_id must be one of {sorted(BUILTIN_DNFS)}, got {scenario_id}")
    if p < 10:
        raise ValueError(f"built-in scenarios need p >= 10, got p={p}")
    dnf = BUILTIN_DNFS[scenario_id]
    probs = _probs_for(dnf, p, calibration, target_prevalence)
    return ScenarioSpec(n=n, p=p, dnf=dnf, probs=probs, seed=seed)


def eval_dnf(dnf, row) -> int:
    """1 iff some term has all its columns >= 1 (code 2 counts as present)."""
    row = np.asarray(row)
    for term in dnf:
        if all(row[v] >= 1 for v in term):
            return 1
    return 0


def _labels(dnf, x: np.ndarray) -> np.ndarray:
    y = np.zeros(x.shape[0], dtype=np.int8)
    for term in dnf:
        y |= (x[:, term] >= 1).all(axis=1)
    return y


def generate(spec: ScenarioSpec, seed: int | None = None) -> Dataset:
    """Draw a dataset from the scenario; same seed, same bits.

    Entries are independent Bernoulli(probs[j]); labels follow the DNF
    deterministically unless ``flip_prob`` > 0, in which case each positive
    label is knocked down to 0 with that probability.
    """
    rng = np.random.default_rng(spec.seed if seed is None else seed)
    x = (rng.random((spec.n, spec.p)) < spec.probs).astype(np.int8)
    y = _labels(spec.dnf, x)
    if spec.flip_prob > 0.0:
        flips = rng.random(spec.n) < spec.flip_prob
        y = np.where(flips & (y == 1), 0, y).astype(np.int8)
    return Dataset(x, y)


def replicate_seed(seed: int, replicate: int) -> int:
    """Derived seed for one replicate of a seeded study."""
    return seed ^ replicate


def dnf_to_text(dnf) -> str:
    """One term per line, comma-separated 0-based column indices."""
    return "\n".join(",".join(str(v) for v in term) for term in dnf)


def dnf_from_text(text: str) -> tuple[tuple[int, ...], ...]:
    terms = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            terms.append(tuple(int(tok) for tok in line.split(",")))
        except ValueError as exc:
            raise ValueError(f"bad term on line {lineno}: {line!r}") from exc
    if not terms:
        raise ValueError("no terms found")
    return tuple(terms)
