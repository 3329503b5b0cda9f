"""Dependency-free statistical kernels.

Survival functions for Student's t and Fisher's F are computed from the
regularized incomplete beta function, evaluated with a modified Lentz
continued fraction.  Keeping these in-package (rather than pulling in a
scientific stack) pins the exact numerics the causality pipeline runs on;
the test suite cross-checks every function against an independent
implementation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Lentz continued-fraction controls.  FPMIN guards divisions against exact
# zero terms; the iteration cap is generous (convergence typically needs
# fewer than 60 terms for the degrees of freedom seen here).
_FPMIN = 1e-300
_EPS = 1e-16
_MAX_ITER = 500


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the regularized incomplete beta at (a, b, x)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise RuntimeError(
        f"incomplete beta continued fraction failed to converge at a={a}, b={b}, x={x}"
    )


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError(f"shape parameters must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got x={x}")
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
    # The continued fraction converges fast only below the distribution's
    # bulk; use the I_x(a,b) = 1 - I_{1-x}(b,a) symmetry above it.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_sf(t: float, df: float) -> float:
    """One-sided survival P(T > t) for Student's t with ``df`` degrees of freedom.

    Two-sided p-values are 2 * t_sf(|t|, df).
    """
    if df <= 0.0:
        raise ValueError(f"degrees of freedom must be positive, got {df}")
    if math.isnan(t):
        raise ValueError("t statistic is NaN")
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    half_tail = 0.5 * betainc_reg(0.5 * df, 0.5, df / (df + t * t))
    return half_tail if t >= 0.0 else 1.0 - half_tail


def f_sf(f: float, d1: float, d2: float) -> float:
    """Survival P(F > f) for Fisher's F with (d1, d2) degrees of freedom."""
    if d1 <= 0.0 or d2 <= 0.0:
        raise ValueError(f"degrees of freedom must be positive, got d1={d1}, d2={d2}")
    if f < 0.0 or math.isnan(f):
        raise ValueError(f"F statistic must be a non-negative real, got {f}")
    if f == 0.0:
        return 1.0
    if math.isinf(f):
        return 0.0
    return betainc_reg(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f))


def pearson(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation of two equal-length, non-constant vectors."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1 or x.size != y.size:
        raise ValueError("pearson expects two 1-D vectors of equal length")
    if x.size < 3:
        raise ValueError("pearson needs at least three points")
    xc = x - x.mean()
    yc = y - y.mean()
    sx = math.sqrt(float(xc @ xc))
    sy = math.sqrt(float(yc @ yc))
    if sx == 0.0 or sy == 0.0:
        raise ValueError("pearson is undefined for a constant input")
    r = float(xc @ yc) / (sx * sy)
    return max(-1.0, min(1.0, r))


def bh_adjust(p: np.ndarray) -> np.ndarray:
    """Benjamini-Hochberg step-up adjusted p-values for one family.

    adjusted_(i) = min over j >= i of min(1, m * p_(j) / j) on the ascending
    order statistics, mapped back to the input positions.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("bh_adjust expects a non-empty 1-D vector")
    if np.any(~np.isfinite(p)) or np.any(p < 0.0) or np.any(p > 1.0):
        raise ValueError("p-values must lie in [0, 1]")
    m = p.size
    order = np.argsort(p, kind="stable")
    ranked = p[order] * m / np.arange(1, m + 1)
    adjusted_sorted = np.minimum(1.0, np.minimum.accumulate(ranked[::-1])[::-1])
    out = np.empty(m, dtype=float)
    out[order] = adjusted_sorted
    return out


@dataclass(frozen=True)
class OlsFit:
    """Least-squares summary: coefficients in design-column order plus diagnostics."""

    coefficients: np.ndarray
    residuals: np.ndarray
    rss: float
    r_squared: float
    n_obs: int
    n_params: int
    coef_se: np.ndarray

    def __post_init__(self):
        for field in ("coefficients", "residuals", "coef_se"):
            arr = np.array(getattr(self, field), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, field, arr)


def ols(design: np.ndarray, response: np.ndarray) -> OlsFit:
    """Ordinary least squares of ``response`` on the columns of ``design``.

    The caller supplies the full design, intercept column included if one is
    wanted.  Solved through a QR factorization; ``r_squared`` always compares
    against the intercept-only (mean) baseline and is reported as 0.0 for a
    constant response.
    """
    y = np.asarray(response, dtype=float)
    x = np.asarray(design, dtype=float)
    if y.ndim != 1:
        raise ValueError("response must be 1-D")
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] != y.size:
        raise ValueError(f"design shape {x.shape} does not match response length {y.size}")
    n, k = x.shape
    if n <= k:
        raise ValueError(f"need more observations than parameters: n={n}, k={k}")

    q, r = np.linalg.qr(x)
    diag = np.abs(np.diag(r))
    scale = float(diag.max()) if diag.size else 0.0
    # With unpivoted QR, the first near-zero |R_jj| names the column that is
    # linearly dependent on the columns before it.
    bad = np.nonzero((diag < 1e-10 * scale) | (diag == 0.0))[0]
    if bad.size:
        raise ValueError(
            f"design is rank deficient: column {int(bad[0])} is linearly dependent "
            "on earlier columns"
        )
    beta = np.linalg.solve(r, q.T @ y)

    resid = y - x @ beta
    rss = float(resid @ resid)
    tss = float(np.sum((y - y.mean()) ** 2))
    if tss == 0.0:
        r_squared = 0.0
    else:
        r_squared = 1.0 - rss / tss
        if -1e-12 < r_squared < 0.0:
            r_squared = 0.0

    dof = n - k
    sigma2 = rss / dof
    rinv = np.linalg.solve(r, np.eye(k))
    se = np.sqrt(np.sum(rinv * rinv, axis=1) * sigma2)
    return OlsFit(
        coefficients=beta,
        residuals=resid,
        rss=rss,
        r_squared=float(r_squared),
        n_obs=n,
        n_params=k,
        coef_se=se,
    )
