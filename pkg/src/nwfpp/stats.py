"""Empirical CDFs, Kolmogorov-Smirnov tests and a few reference distributions."""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf
from scipy.stats import chi2

KS_COEF_005 = 1.358


class ECDF:
    """Right-continuous empirical distribution function."""

    def __init__(self, samples):
        x = np.sort(np.asarray(samples, dtype=float).ravel())
        if x.size == 0:
            raise ValueError("ECDF needs at least one sample")
        self.x = x

    @property
    def n(self):
        return int(self.x.size)

    def __call__(self, t):
        return np.searchsorted(self.x, np.asarray(t, dtype=float), side="right") / self.n


@dataclass(frozen=True)
class KSResult:
    statistic: float
    n_eff: float
    critical_005: float

    @property
    def passed(self):
        return self.statistic < self.critical_005

    def as_dict(self):
        return {"statistic": self.statistic, "n_eff": self.n_eff,
                "critical_005": self.critical_005, "pass": self.passed}


def ks_one_sample(samples, cdf):
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n == 0:
        raise ValueError("no samples")
    f = np.asarray(cdf(x), dtype=float)
    # left limits of the cdf, so atoms in a step-function cdf are handled exactly
    f_left = np.asarray(cdf(np.nextafter(x, -np.inf)), dtype=float)
    # ECDF at and just before each sample; ties form a single step
    hi = np.searchsorted(x, x, side="right") / n
    lo = np.searchsorted(x, x, side="left") / n
    d = max(np.max(np.abs(hi - f)), np.max(np.abs(lo - f_left)))
    return KSResult(float(min(max(d, 0.0), 1.0)), float(n), KS_COEF_005 / math.sqrt(n))


def ks_two_sample(a, b):
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    d = float(np.max(np.abs(fa - fb)))
    n_eff = a.size * b.size / (a.size + b.size)
    return KSResult(d, n_eff, KS_COEF_005 / math.sqrt(n_eff))


def gumbel_cdf(x):
    # exp(-x) overflows below x ~ -709, where the cdf is 0 anyway
    with np.errstate(over="ignore"):
        return np.exp(-np.exp(-np.asarray(x, dtype=float)))


def normal_cdf(x):
    return 0.5 * (1.0 + erf(np.asarray(x, dtype=float) / math.sqrt(2.0)))


def gumbel_sample(rng, size=None):
    u = rng.random(size)
    # U == 0 has probability 2^-53; map it to the smallest positive double
    u = np.where(u > 0, u, np.finfo(float).tiny)
    out = -np.log(-np.log(u))
    return float(out) if size is None else out


def chi_square(counts, probs):
    """Pearson statistic and p-value against fixed category probabilities (no fitted parameters)."""
    counts = np.asarray(counts, dtype=float)
    probs = np.asarray(probs, dtype=float)
    if counts.shape != probs.shape or counts.size < 2:
        raise ValueError("counts and probs must have the same length >= 2")
    total = counts.sum()
    if total <= 0:
        raise ValueError("no observations")
    expected = total * probs / probs.sum()
    stat = float(np.sum((counts - expected) ** 2 / expected))
    return stat, float(chi2.sf(stat, counts.size - 1))
