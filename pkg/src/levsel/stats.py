"""Statistical primitives: correlation, per-variable slope tests, kernel densities.

Zero-variance inputs never produce a silent 0: correlation and test results
come back as NaN markers, which downstream ranking places last.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_BETACF_MAX_ITER = 200
_BETACF_TOL = 1e-14


@dataclass
class UnivariateTestResult:
    """Two-sided t test of the slope in a single-variable least-squares fit."""

    slope: float
    t_statistic: float
    p_value: float
    df: int

    @property
    def defined(self) -> bool:
        return not math.isnan(self.p_value)


def pearson(xcol, y) -> float:
    """Product-moment correlation, or NaN when either argument has zero variance."""
    xcol = np.asarray(xcol, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if xcol.shape != y.shape or xcol.ndim != 1:
        raise ValueError(f"length mismatch: {xcol.shape} vs {y.shape}")
    if xcol.size < 2:
        raise ValueError("need at least 2 observations")
    xc = xcol - xcol.mean()
    yc = y - y.mean()
    den = math.sqrt(float(xc @ xc) * float(yc @ yc))
    if den == 0.0:
        return math.nan
    return float(xc @ yc) / den


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz iteration)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, _BETACF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        de = d * c
        h *= de
        if abs(de - 1.0) < _BETACF_TOL:
            return h
    return h


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must be in [0, 1], got {x}")
    if a <= 0.0 or b <= 0.0:
        raise ValueError("a and b must be positive")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # The continued fraction converges fastest below the distribution mean.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_sf_two_sided(t: float, df: int) -> float:
    """P(|T_df| >= |t|) via the incomplete-beta identity."""
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    if math.isinf(t):
        return 0.0
    return betainc_reg(0.5 * df, 0.5, df / (df + t * t))


def univariate_pvalue(xcol, y) -> UnivariateTestResult:
    """Slope test of the least-squares line of y on (1, xcol).

    Returns the NaN-marker result for a constant xcol (no slope to test);
    a perfect fit with nonzero residual df gives p_value 0.
    """
    xcol = np.asarray(xcol, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if xcol.shape != y.shape or xcol.ndim != 1:
        raise ValueError(f"length mismatch: {xcol.shape} vs {y.shape}")
    n = xcol.size
    if n < 3:
        raise ValueError("need at least 3 observations for a slope test")
    df = n - 2
    xc = xcol - xcol.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    if sxx == 0.0:
        return UnivariateTestResult(math.nan, math.nan, math.nan, df)
    sxy = float(xc @ yc)
    syy = float(yc @ yc)
    slope = sxy / sxx
    rss = max(syy - slope * sxy, 0.0)
    sigma2 = rss / df
    if sigma2 == 0.0:
        if slope == 0.0:
            # constant y: the fit is exact but carries no slope information
            return UnivariateTestResult(0.0, math.nan, math.nan, df)
        return UnivariateTestResult(slope, math.inf, 0.0, df)
    t = slope / math.sqrt(sigma2 / sxx)
    return UnivariateTestResult(slope, t, t_sf_two_sided(t, df), df)


def univariate_pvalues(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Column-wise p-values of the slope test; NaN for constant columns."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = y.size
    if n < 3:
        raise ValueError("need at least 3 observations for a slope test")
    df = n - 2
    xc = x - x.mean(axis=0)
    yc = y - y.mean()
    sxx = np.einsum("ij,ij->j", xc, xc)
    sxy = xc.T @ yc
    syy = float(yc @ yc)
    out = np.full(x.shape[1], np.nan)
    ok = sxx > 0.0
    slope = np.zeros_like(sxx)
    slope[ok] = sxy[ok] / sxx[ok]
    rss = np.maximum(syy - slope * sxy, 0.0)
    for j in np.flatnonzero(ok):
        sigma2 = rss[j] / df
        if sigma2 == 0.0:
            out[j] = math.nan if slope[j] == 0.0 else 0.0
        else:
            out[j] = t_sf_two_sided(slope[j] / math.sqrt(sigma2 / sxx[j]), df)
    return out


def silverman_bandwidth(values: np.ndarray) -> float:
    """0.9 * min(sd, IQR/1.34) * m^(-1/5), with a positive fallback for flat data.

    A zero sd (all values equal) falls back to 1e-3 * (1 + |v|); a zero IQR
    with positive sd falls back to the sd alone.
    """
    values = np.asarray(values, dtype=np.float64)
    m = values.size
    sd = float(values.std(ddof=1)) if m > 1 else 0.0
    if sd == 0.0:
        return 1e-3 * (1.0 + abs(float(values[0])))
    q75, q25 = np.percentile(values, [75.0, 25.0])
    iqr = float(q75 - q25)
    spread = min(sd, iqr / 1.34) if iqr > 0.0 else sd
    return 0.9 * spread * m ** (-0.2)


def kde(values, grid, bandwidth: float | None = None) -> np.ndarray:
    """Gaussian-kernel density of ``values`` evaluated at ``grid`` points."""
    values = np.asarray(values, dtype=np.float64)
    grid = np.asarray(grid, dtype=np.float64)
    if values.size == 0:
        raise ValueError("cannot estimate a density from no values")
    h = silverman_bandwidth(values) if bandwidth is None else float(bandwidth)
    if h <= 0.0:
        raise ValueError(f"bandwidth must be positive, got {h}")
    z = (grid[:, None] - values[None, :]) / h
    return np.exp(-0.5 * z * z).sum(axis=1) / (values.size * h * math.sqrt(2.0 * math.pi))


def kde_grid(values, points: int = 512, pad_bandwidths: float = 3.0) -> np.ndarray:
    """Evaluation grid spanning the data plus a margin of ``pad_bandwidths`` * h."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("cannot build a grid from no values")
    h = silverman_bandwidth(values)
    lo = float(values.min()) - pad_bandwidths * h
    hi = float(values.max()) + pad_bandwidths * h
    return np.linspace(lo, hi, points)
