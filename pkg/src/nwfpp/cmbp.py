"""Two-type continuous-time Markov branching process.

Particles live Exp(1).  On death a red particle leaves 1 red and Poi(rho) blue
children, a blue particle leaves 2 red and Poi(rho) blue children.  Only the
alive counts ``(A_R, A_B)`` and the split log are tracked: with i.i.d.
exponential lifetimes the next particle to die is uniform over the alive ones,
so sampling its type from the counts is exact.

Two ways to start the process are supported:

``start="split"``
    the root dies at time 0 (``T_1 = 0``) and its children are alive at 0+.
    This is the process seen by the graph exploration, whose source is settled
    at time 0 and whose frontier starts with full edge weights.
``start="particle"``
    a single live root particle at time 0 with its own Exp(1) lifetime, the
    usual convention for ``W^(R)``, ``W^(B)`` and the mean matrix ``exp(Qt)``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .rng import exp1, stream
from .theory import constants, second_moments

RED, BLUE = 0, 1
MAX_SPLITS = 10**8
DEFAULT_MAX_ALIVE = 20_000
_TYPES = {"red": RED, "R": RED, RED: RED, "blue": BLUE, "B": BLUE, BLUE: BLUE}


class ResourceError(RuntimeError):
    pass


def _type(root):
    try:
        return _TYPES[root]
    except KeyError:
        raise ValueError(f"unknown particle type {root!r}") from None


@dataclass
class BPTrajectory:
    rho: float
    root_type: int
    start: str
    T: np.ndarray            # split times
    parent_type: np.ndarray
    d_R: np.ndarray
    d_B: np.ndarray
    S: np.ndarray            # alive count just after each split
    A_R: int
    A_B: int
    t_end: float

    @property
    def splits(self):
        return int(self.T.size)

    @property
    def D(self):
        return self.d_R + self.d_B

    def dead_counts(self, m=None):
        """(N_R, N_B) after the first ``m`` splits."""
        p = self.parent_type[: self.splits if m is None else m]
        n_r = int(np.count_nonzero(p == RED))
        return n_r, p.size - n_r


def simulate(rho, root="blue", at_time=None, at_splits=None, seed=0, start="split", rng=None):
    """Event-by-event trajectory, stopped at time ``at_time`` or after ``at_splits`` splits."""
    if not rho > 0:
        raise ValueError("rho must be > 0")
    if (at_time is None) == (at_splits is None):
        raise ValueError("give exactly one of at_time, at_splits")
    if at_splits is not None and at_splits > MAX_SPLITS:
        raise ResourceError(f"at_splits={at_splits} exceeds cap {MAX_SPLITS}")
    if start not in ("split", "particle"):
        raise ValueError(f"unknown start {start!r}")
    root_type = _type(root)
    if rng is None:
        rng = stream(seed, "cmbp.simulate")

    Ts, ptype, dr, db, S = [], [], [], [], []
    t = 0.0
    a = [0, 0]
    a[root_type] = 1
    alive = 1
    limit_t = math.inf if at_time is None else float(at_time)
    limit_m = MAX_SPLITS if at_splits is None else int(at_splits)
    first = start == "split"

    chunk = 4096
    while True:
        pois = rng.poisson(rho, chunk).tolist()
        unif = rng.random(chunk).tolist()
        waits = exp1(rng, chunk).tolist()
        for k in range(chunk):
            if first:
                first = False
            else:
                tn = t + waits[k] / alive
                if tn > limit_t:
                    return _trajectory(rho, root_type, start, Ts, ptype, dr, db, S, a, limit_t)
                t = tn
            q = RED if unif[k] * alive < a[RED] else BLUE
            nb = pois[k]
            nr = 1 if q == RED else 2
            a[q] -= 1
            a[RED] += nr
            a[BLUE] += nb
            alive += nr + nb - 1
            Ts.append(t)
            ptype.append(q)
            dr.append(nr)
            db.append(nb)
            S.append(alive)
            if len(Ts) >= limit_m:
                return _trajectory(rho, root_type, start, Ts, ptype, dr, db, S, a, t)
            if len(Ts) >= MAX_SPLITS:
                raise ResourceError("split cap reached before the stopping time")


def _trajectory(rho, root_type, start, Ts, ptype, dr, db, S, a, t_end):
    return BPTrajectory(
        rho=rho,
        root_type=root_type,
        start=start,
        T=np.array(Ts, dtype=float),
        parent_type=np.array(ptype, dtype=np.int8),
        d_R=np.array(dr, dtype=np.int64),
        d_B=np.array(db, dtype=np.int64),
        S=np.array(S, dtype=np.int64),
        A_R=int(a[RED]),
        A_B=int(a[BLUE]),
        t_end=float(t_end),
    )


def martingale_W(traj, k=None):
    """W_t = e^{-lam t} (A_R u_R + A_B u_B) at the trajectory's stopping time."""
    if k is None:
        k = constants(traj.rho)
    return math.exp(-k.lam * traj.t_end) * (traj.A_R * k.u_R + traj.A_B * k.u_B)


def alive_at(rho, t, reps, root="blue", seed=0, start="particle", rng=None):
    """Alive counts (A_R, A_B) at time ``t`` for ``reps`` independent processes."""
    ar, ab, _ = _run_batch(rho, _type(root), t, reps, start, math.inf,
                           rng if rng is not None else stream(seed, "cmbp.alive_at"))
    return ar, ab


def sample_W(rho, root="blue", horizon=None, reps=1000, seed=0, start="split",
             max_alive=DEFAULT_MAX_ALIVE, residual=True, rng=None):
    """Independent samples of the martingale limit W.

    Each replicate runs until ``horizon`` (default ``15 / lam``) or until it has
    ``max_alive`` particles, whichever comes first, and returns
    ``e^{-lam t} A(t) u``.  Both rules are stopping times, so every sample is an
    unbiased conditional mean of W.  Given the state at the stop, the rest of W
    is a sum of ``A`` independent single-particle limits; with ``residual`` the
    replicates stopped by the particle cap get that sum's Gaussian fluctuation
    added back, using the exact second moments of W^(R) and W^(B).
    """
    k = constants(rho)
    if horizon is None:
        horizon = 15.0 / k.lam
    if rng is None:
        rng = stream(seed, "cmbp.sample_W", _type(root), 0 if start == "split" else 1)
    ar, ab, t = _run_batch(rho, _type(root), horizon, reps, start, max_alive, rng)
    scale = np.exp(-k.lam * t)
    W = scale * (ar * k.u_R + ab * k.u_B)
    if residual:
        sR, sB = second_moments(k)
        capped = (ar + ab) >= max_alive
        var = ar * (sR - k.u_R**2) + ab * (sB - k.u_B**2)
        z = rng.standard_normal(reps)
        W = np.where(capped, W + scale * np.sqrt(var) * z, W)
    return W


def _run_batch(rho, root_type, horizon, reps, start, max_alive, rng):
    """Vectorised Gillespie over replicates: one split per live replicate per sweep."""
    AR = np.zeros(reps, dtype=np.int64)
    AB = np.zeros(reps, dtype=np.int64)
    t = np.zeros(reps)
    if start == "split":
        AR += 1 if root_type == RED else 2
        AB += rng.poisson(rho, reps)
    elif start == "particle":
        (AR if root_type == RED else AB)[:] = 1
    else:
        raise ValueError(f"unknown start {start!r}")

    idx = np.arange(reps)
    ar, ab, tt = AR.copy(), AB.copy(), t.copy()
    while idx.size:
        alive = ar + ab
        tn = tt + exp1(rng, idx.size) / alive
        over = tn > horizon
        full = alive >= max_alive
        stop = over | full
        if stop.any():
            t[idx[over]] = horizon
            t[idx[full & ~over]] = tt[full & ~over]
            AR[idx[stop]] = ar[stop]
            AB[idx[stop]] = ab[stop]
            keep = ~stop
            idx, ar, ab, tt, tn = idx[keep], ar[keep], ab[keep], tt[keep], tn[keep]
            if not idx.size:
                break
            alive = ar + ab
        tt = tn
        red = rng.random(idx.size) * alive < ar
        nb = rng.poisson(rho, idx.size)
        # red: -1 red, +1 red; blue: -1 blue, +2 red
        ar = ar + np.where(red, 0, 2)
        ab = ab + nb - np.where(red, 0, 1)
    return AR, AB, t


def generation_sample(traj, k=None, rng=None, seed=0, size=None):
    """Generation of a uniformly chosen alive particle after split ``k``.

    G_k = L_1 + ... + L_k with independent L_i ~ Bernoulli(D_i / S_i) given the
    split log.  ``k`` defaults to all splits in the trajectory.
    """
    if k is None:
        k = traj.splits
    if not 1 <= k <= traj.splits:
        raise ValueError(f"k must be in [1, {traj.splits}]")
    if rng is None:
        rng = stream(seed, "cmbp.generation")
    p = traj.D[:k] / traj.S[:k]
    if size is None:
        return int(np.count_nonzero(rng.random(k) < p))
    out = np.empty(size, dtype=np.int64)
    for i in range(size):
        out[i] = np.count_nonzero(rng.random(k) < p)
    return out


def generation_mean(traj, k=None):
    """E[G_k | split log] = sum of D_i / S_i."""
    k = traj.splits if k is None else k
    return float(np.sum(traj.D[:k] / traj.S[:k]))
