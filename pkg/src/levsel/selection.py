"""Deterministic top-k variable selection under four ranking criteria.

Criteria:

* ``cls``  -- cross-leverage scores; default ranks |c_i| descending,
  ``signed`` mode ranks c_i descending.
* ``ls``   -- leverage scores; default ranks ascending (on binary data the
  informative variables sit at the low end), ``descending`` available for
  continuous-style use.
* ``cor``  -- Pearson correlation with the response; |r| or signed.
* ``pval`` -- per-variable slope-test p-value, ascending.

NaN markers (zero-variance columns) always rank last.  Ties break toward
the lowest column index, so selections are total orders and reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, require_two_classes
from .scores import ScoreSet, compute_scores
from .stats import pearson, univariate_pvalues

CRITERIA = ("cls", "ls", "cor", "pval", "combined")


def sample_size(n: int) -> int:
    """ceil(n * ln n), the default number of variables to keep."""
    if n < 2:
        raise ValueError(f"need at least 2 observations, got n={n}")
    return int(math.ceil(n * math.log(n)))


@dataclass
class SelectionSpec:
    criterion: str = "cls"
    k: int | None = None  # None resolves to sample_size(n)
    cls_mode: str = "absolute"  # or "signed"
    ls_mode: str = "ascending"  # or "descending"
    cor_mode: str = "absolute"  # or "signed"
    pct_cls: float = 0.0  # combined criterion only
    pct_ls: float = 0.0
    combined_mode: str = "union"  # or "sequential"

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise ValueError(f"unknown criterion {self.criterion!r}; pick from {CRITERIA}")
        if self.k is not None and self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.cls_mode not in ("absolute", "signed"):
            raise ValueError(f"cls_mode must be 'absolute' or 'signed', got {self.cls_mode!r}")
        if self.ls_mode not in ("ascending", "descending"):
            raise ValueError(f"ls_mode must be 'ascending' or 'descending', got {self.ls_mode!r}")
        if self.cor_mode not in ("absolute", "signed"):
            raise ValueError(f"cor_mode must be 'absolute' or 'signed', got {self.cor_mode!r}")
        if not (0.0 <= self.pct_cls <= 1.0 and 0.0 <= self.pct_ls <= 1.0):
            raise ValueError("pct_cls and pct_ls must lie in [0, 1]")
        if self.combined_mode not in ("union", "sequential"):
            raise ValueError(
                f"combined_mode must be 'union' or 'sequential', got {self.combined_mode!r}"
            )


@dataclass
class SelectionResult:
    indices: np.ndarray  # chosen column indices, in selection order
    scores_used: np.ndarray | None  # ranking score per chosen index
    criterion: str
    truncated: bool = False  # True when fewer than k columns were available

    def __len__(self) -> int:
        return int(self.indices.size)


def ranking_keys(
    dataset: Dataset,
    criterion: str,
    spec: SelectionSpec | None = None,
    scores: ScoreSet | None = None,
) -> np.ndarray:
    """Per-variable sort key for a criterion; smaller key = selected earlier.

    NaN keys sort last.  ``scores`` lets callers reuse one factorization
    across several criteria.
    """
    spec = spec or SelectionSpec(criterion=criterion if criterion != "combined" else "cls")
    if criterion in ("cls", "ls") and scores is None:
        scores = compute_scores(dataset)
    if criterion == "cls":
        c = scores.cross_leverage
        return -np.abs(c) if spec.cls_mode == "absolute" else -c
    if criterion == "ls":
        lev = scores.leverage
        return lev.copy() if spec.ls_mode == "ascending" else -lev
    if criterion == "cor":
        r = np.array([pearson(dataset.x[:, j], dataset.y) for j in range(dataset.p)])
        return -np.abs(r) if spec.cor_mode == "absolute" else -r
    if criterion == "pval":
        return univariate_pvalues(dataset.x, dataset.y)
    raise ValueError(f"no ranking key for criterion {criterion!r}")


def rank_order(keys: np.ndarray) -> np.ndarray:
    """Column indices sorted by key; stable, so ties fall to the lowest index."""
    # argsort is stable for kind='stable' and NaNs land at the end
    return np.argsort(keys, kind="stable")


def select(
    dataset: Dataset, spec: SelectionSpec, scores: ScoreSet | None = None
) -> SelectionResult:
    """Top-k columns of ``dataset`` under ``spec``.

    Requests for more columns than exist return all of them with the
    ``truncated`` flag set.
    """
    if spec.criterion == "combined":
        return select_combined(
            dataset,
            pct_cls=spec.pct_cls,
            pct_ls=spec.pct_ls,
            mode=spec.combined_mode,
            k=spec.k,
            scores=scores,
            spec=spec,
        )
    require_two_classes(dataset, "variable selection")
    k = spec.k if spec.k is not None else sample_size(dataset.n)
    keys = ranking_keys(dataset, spec.criterion, spec, scores)
    order = rank_order(keys)
    truncated = k > dataset.p
    chosen = order[: min(k, dataset.p)]
    raw = _raw_scores(dataset, spec.criterion, spec, scores)
    return SelectionResult(
        indices=chosen,
        scores_used=raw[chosen],
        criterion=spec.criterion,
        truncated=truncated,
    )


def _raw_scores(dataset, criterion, spec, scores):
    """The reported score per column: the ranking value without sort direction."""
    keys = ranking_keys(dataset, criterion, spec, scores)
    if criterion == "pval" or (criterion == "ls" and spec.ls_mode == "ascending"):
        return keys
    return -keys


def select_combined(
    dataset: Dataset,
    pct_cls: float,
    pct_ls: float,
    mode: str = "union",
    k: int | None = None,
    scores: ScoreSet | None = None,
    spec: SelectionSpec | None = None,
) -> SelectionResult:
    """Combine leverage-based and cross-leverage-based picks.

    ``union`` takes ceil(pct_cls * p) columns by the cls rule plus
    ceil(pct_ls * p) by the ls rule and returns their union (cls picks
    first, then new ls picks).  ``sequential`` takes ceil(pct_ls * p)
    lowest-leverage columns first and fills the remaining slots up to an
    explicit total ``k`` from the still-unchosen columns by the cls rule.
    """
    require_two_classes(dataset, "variable selection")
    spec = spec or SelectionSpec(criterion="combined", pct_cls=pct_cls, pct_ls=pct_ls,
                                 combined_mode=mode)
    if scores is None:
        scores = compute_scores(dataset)
    p = dataset.p
    cls_order = rank_order(ranking_keys(dataset, "cls", spec, scores))
    ls_order = rank_order(ranking_keys(dataset, "ls", spec, scores))
    n_cls = math.ceil(pct_cls * p)
    n_ls = math.ceil(pct_ls * p)

    if mode == "union":
        chosen: list[int] = list(cls_order[:n_cls])
        in_set = set(chosen)
        for j in ls_order[:n_ls]:
            if j not in in_set:
                chosen.append(j)
                in_set.add(j)
    elif mode == "sequential":
        if k is None:
            raise ValueError("sequential combination needs an explicit total k")
        chosen = list(ls_order[: min(n_ls, k)])
        in_set = set(chosen)
        for j in cls_order:
            if len(chosen) >= k:
                break
            if j not in in_set:
                chosen.append(j)
                in_set.add(j)
    else:
        raise ValueError(f"unknown combination mode {mode!r}")

    truncated = k is not None and len(chosen) < k
    return SelectionResult(
        indices=np.asarray(chosen, dtype=int),
        scores_used=None,
        criterion="combined",
        truncated=truncated,
    )
