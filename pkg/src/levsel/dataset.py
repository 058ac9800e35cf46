"""Container for a wide design matrix of genotype/indicator codes plus a binary response."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ALLOWED_CODES = (0, 1, 2)


@dataclass
class Dataset:
    """An n x p matrix of {0,1} or {0,1,2} codes and a {0,1} response of length n.

    Rows are observations, columns are variables.  ``variable_names``, when
    given, must have exactly one distinct name per column; otherwise names
    default to ``X1 .. Xp`` on demand (columns are 0-indexed everywhere in
    the API, the default names are 1-based labels).
    """

    x: np.ndarray
    y: np.ndarray
    variable_names: list[str] | None = field(default=None)

    def __post_init__(self):
        x = np.asarray(self.x)
        y = np.asarray(self.y)
        if x.ndim != 2:
            raise ValueError(f"x must be 2-dimensional, got shape {x.shape}")
        if y.ndim != 1:
            raise ValueError(f"y must be 1-dimensional, got shape {y.shape}")
        if x.shape[0] != y.shape[0]:
            raise ValueError(
                f"x has {x.shape[0]} rows but y has {y.shape[0]} entries"
            )
        if x.shape[0] < 1 or x.shape[1] < 1:
            raise ValueError(f"x must be non-empty, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError("x contains non-finite entries")
        if not np.isin(x, ALLOWED_CODES).all():
            bad = x[~np.isin(x, ALLOWED_CODES)][0]
            raise ValueError(f"x entries must be in {ALLOWED_CODES}, found {bad!r}")
        if not np.isin(y, (0, 1)).all():
            bad = y[~np.isin(y, (0, 1))][0]
            raise ValueError(f"y entries must be 0 or 1, found {bad!r}")
        self.x = x.astype(np.int8, copy=False)
        self.y = y.astype(np.int8, copy=False)
        if self.variable_names is not None:
            names = list(self.variable_names)
            if len(names) != self.p:
                raise ValueError(
                    f"variable_names has length {len(names)}, expected p={self.p}"
                )
            if len(set(names)) != len(names):
                raise ValueError("variable_names contains duplicates")
            self.variable_names = names

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    @property
    def is_binary(self) -> bool:
        """True when all codes are in {0,1}."""
        return bool((self.x <= 1).all())

    def names(self) -> list[str]:
        """Variable names, defaulting to X1..Xp."""
        if self.variable_names is not None:
            return self.variable_names
        return [f"X{j + 1}" for j in range(self.p)]

    def subset(self, indices) -> "Dataset":
        """New Dataset restricted to the given column indices (order kept)."""
        idx = np.asarray(indices, dtype=int)
        names = None
        if self.variable_names is not None:
            names = [self.variable_names[j] for j in idx]
        return Dataset(self.x[:, idx], self.y, names)


def require_two_classes(dataset: Dataset, context: str) -> None:
    """Raise unless the response has at least one 0 and one 1."""
    y = dataset.y
    if y.min() == y.max():
        raise ValueError(
            f"{context} requires a response with both classes present; "
            f"y is constant at {int(y[0])}"
        )
