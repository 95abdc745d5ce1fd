"""Campaign runner: JSON config -> seeded replications -> CSV files and a summary.

Every replication (one graph) derives its seeds from
``(master_seed, experiment family, n, rep)`` only, and results are gathered in
rep order, so the CSV outputs do not depend on the number of workers.
``distance`` and ``hopcount`` share the ``pairs`` family and therefore the same
graphs and pairs.
"""
import json
import logging
import math
import os
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import cmbp, fpp, mgf, nwgraph, stats
from .rng import derive_seed, stream
from .theory import constants, hopcount_centering, limit_distance, x_of_t

log = logging.getLogger(__name__)

EXPERIMENTS = ("distance", "hopcount", "epidemic", "collision")

# calibration targets for finite n, not critical values
THRESHOLDS = {
    "distance_ks": 0.1,
    "median_shift_rel": 0.10,
    "w_coupling_ks": 0.05,
    "hop_mean_rel": 0.10,
    "hop_var_rel": 0.25,
    "hop_ks": 0.1,
    "epidemic_mean_sup": 0.05,
    "epidemic_ks": 0.15,
    "epidemic_window": (0.1, 0.9),
    "collision_rel": 0.15,
    "collision_chi2_p": 0.01,
    "collision_stability_z": 3.0,
}


REQUIRED_KEYS = ("experiment", "n_list", "rho", "reps", "pairs_per_graph")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: tuple
    n_list: tuple
    rho: float
    reps: int
    pairs_per_graph: int
    master_seed: int = 0
    bp_horizon: float = None
    output_dir: str = "results"
    # draws from the limit laws; None means one per empirical sample
    bp_reps: int = None
    # epidemic t-axis (t0, t1, dt); None means [-4/lam, 4/lam] step 0.1/lam
    t_grid: tuple = None
    # collision window (s0, s1); None means [-1/lam, 1/lam]
    s_window: tuple = None

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        for key in d:
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
        for key in REQUIRED_KEYS:
            if key not in d:
                raise ConfigError(f"missing config key {key!r}")
        d = dict(d)
        exp = d["experiment"]
        d["experiment"] = (exp,) if isinstance(exp, str) else tuple(exp)
        d["n_list"] = tuple(int(n) for n in d["n_list"])
        for key in ("t_grid", "s_window"):
            if d.get(key) is not None:
                d[key] = tuple(float(x) for x in d[key])
        cfg = cls(**d)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            text = fh.read()
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
        return cls.from_dict(raw)

    def validate(self):
        for e in self.experiment:
            if e not in EXPERIMENTS:
                raise ConfigError(f"experiment: unknown value {e!r}, expected one of {EXPERIMENTS}")
        if not self.experiment:
            raise ConfigError("experiment: empty")
        if not self.n_list or any(n < 3 for n in self.n_list):
            raise ConfigError("n_list: entries must be >= 3")
        if not self.rho > 0:
            raise ConfigError("rho: must be > 0")
        if self.reps < 1:
            raise ConfigError("reps: must be >= 1")
        if self.pairs_per_graph < 1:
            raise ConfigError("pairs_per_graph: must be >= 1")
        if self.bp_reps is not None and self.bp_reps < 10:
            raise ConfigError("bp_reps: must be >= 10")
        if self.t_grid is not None and (len(self.t_grid) != 3 or self.t_grid[2] <= 0
                                        or self.t_grid[1] < self.t_grid[0]):
            raise ConfigError("t_grid: expected [t0, t1, dt] with t0 <= t1, dt > 0")
        if self.s_window is not None and (len(self.s_window) != 2 or self.s_window[1] <= self.s_window[0]):
            raise ConfigError("s_window: expected [s0, s1] with s0 < s1")

    def as_json(self):
        d = asdict(self)
        d["experiment"] = list(self.experiment)
        d["n_list"] = list(self.n_list)
        return d


# -- output helpers -------------------------------------------------------

def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, stats.KSResult):
        return _jsonable(obj.as_dict())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


# -- replication workers (module level so they pickle) --------------------

def _safe(fn, args):
    try:
        return {"ok": True, "value": fn(*args)}
    except Exception as e:  # isolate the failing rep, keep the campaign going
        return {"ok": False, "error": f"{type(e).__name__}: {e}", "trace": traceback.format_exc()}


def _star(job):
    fn, args = job
    return _safe(fn, args)


def _map(fn, arglist, workers):
    jobs = [(fn, a) for a in arglist]
    if workers <= 1 or len(jobs) <= 1:
        return [_star(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_star, jobs))


def _graph(rho, n, family, rep, master_seed):
    return nwgraph.generate(nwgraph.GraphConfig(n, rho, derive_seed(master_seed, family, n, rep)))


def _pairs(rng, n, count):
    out = []
    for _ in range(count):
        u = int(rng.integers(n))
        v = int(rng.integers(n))
        while v == u:
            v = int(rng.integers(n))
        out.append((u, v))
    return out


def pairs_rep(rho, n, rep, pairs, master_seed):
    """Distances and hopcounts of uniform pairs on one graph, plus W_U^(n)."""
    k = constants(rho)
    g = _graph(rho, n, "pairs", rep, master_seed)
    rng = stream(master_seed, "pairs.choice", n, rep)
    tf = fpp.default_t_freeze(k, n)
    rows = []
    for i, (u, v) in enumerate(_pairs(rng, n, pairs)):
        res = fpp.collision_connect(g, u, v, tf)
        w_u, _ = fpp.collision_martingales(res, k)
        additive = res.hopcount == res.hops_u + res.hops_v and res.hopcount == len(res.path) - 1
        rows.append((i, u, v, res.weight, res.hopcount, w_u, additive))
    return rows


def epidemic_rep(rho, n, rep, sources, master_seed, t_grid):
    k = constants(rho)
    g = _graph(rho, n, "epidemic", rep, master_seed)
    rng = stream(master_seed, "epidemic.choice", n, rep)
    shift = math.log(n) / k.lam
    tf = fpp.default_t_freeze(k, n)
    out = []
    for i in range(sources):
        s = int(rng.integers(n))
        dist, _, _ = fpp.shortest_path_tree(g, s)
        curve = fpp.epidemic_curve(g, s, np.asarray(t_grid) + shift, dist)
        w_n = fpp.swt_martingale(fpp.explore(g, s, at_time=tf), k)
        out.append((i, s, curve, w_n))
    return out


def collision_rep(rho, n, rep, pairs, master_seed, s0, s1):
    k = constants(rho)
    g = _graph(rho, n, "collision", rep, master_seed)
    rng = stream(master_seed, "collision.choice", n, rep)
    tf = fpp.default_t_freeze(k, n)
    out = []
    for i, (u, v) in enumerate(_pairs(rng, n, pairs)):
        res = fpp.collision_connect(g, u, v, tf, horizon=s1)
        if res.direct:
            out.append({"instance": i, "direct": True})
            continue
        w_u, w_v = fpp.collision_martingales(res, k)
        log_rows = [(c.s, c.color_pair, c.remaining) for c in res.collisions
                    if not c.secondary and c.s <= s1]
        in_window = [r for r in log_rows if r[0] >= s0]
        out.append({"instance": i, "direct": False, "w_u": w_u, "w_v": w_v,
                    "log": log_rows, "count": len(in_window),
                    "pairs": [r[1] for r in in_window],
                    "complete": res.horizon_reached})
    return out


# -- experiments ----------------------------------------------------------

class _Run:
    """Shared state of one campaign: config, workers, caches, failures."""

    def __init__(self, cfg, workers=1):
        self.cfg = cfg
        self.k = constants(cfg.rho)
        self.workers = workers
        self.failures = []
        self._pairs_cache = {}
        os.makedirs(cfg.output_dir, exist_ok=True)
        if not os.access(cfg.output_dir, os.W_OK):
            raise ConfigError(f"output_dir: {cfg.output_dir!r} is not writable")

    def path(self, name):
        return os.path.join(self.cfg.output_dir, name)

    def gather(self, family, fn, n, extra):
        args = [(self.cfg.rho, n, rep, self.cfg.pairs_per_graph, self.cfg.master_seed) + extra
                for rep in range(self.cfg.reps)]
        results = _map(fn, args, self.workers)
        good = []
        for rep, r in enumerate(results):
            if r["ok"]:
                good.append((rep, r["value"]))
            else:
                log.warning("%s n=%d rep=%d failed: %s", family, n, rep, r["error"])
                self.failures.append({"experiment": family, "n": n, "rep": rep, "error": r["error"]})
        return good

    def pairs(self, n):
        if n not in self._pairs_cache:
            self._pairs_cache[n] = self.gather("pairs", pairs_rep, n, ())
        return self._pairs_cache[n]

    def w_limit(self, tag, reps):
        """Split-start blue-root W draws (the graph's convention), seeded per purpose."""
        rng = stream(self.cfg.master_seed, "limit.W." + tag)
        return cmbp.sample_W(self.cfg.rho, "blue", horizon=self.cfg.bp_horizon, reps=reps,
                             start="split", rng=rng)


def run_distance(cfg, workers=1, _run=None):
    run = _run or _Run(cfg, workers)
    k = run.k
    t0 = time.perf_counter()
    rows, per_n = [], {}
    for n in cfg.n_list:
        shifted = []
        w_graph = []
        for rep, recs in run.pairs(n):
            for i, u, v, w, _, w_u, _ in recs:
                s = w - math.log(n) / k.lam
                rows.append((n, rep, i, u, v, w, s))
                shifted.append(s)
                if w_u is not None:
                    w_graph.append(w_u)
        per_n[n] = (np.array(shifted), np.array(w_graph))
    write_csv(run.path("distance.csv"), ["n", "rep", "pair", "u", "v", "weight", "shifted_weight"], rows)

    m = cfg.bp_reps or max(len(v[0]) for v in per_n.values())
    W = run.w_limit("distance", 2 * m)
    w_u, w_v = W[:m], W[m:]
    lam_draws = stats.gumbel_sample(stream(cfg.master_seed, "limit.gumbel"), m)
    limit = limit_distance(k, w_u, w_v, lam_draws)
    write_csv(run.path("distance_limit.csv"), ["draw", "W_U", "W_V", "Lambda", "value"],
              [(i, a, b, g, x) for i, (a, b, g, x) in enumerate(zip(w_u, w_v, lam_draws, limit))])

    report = {"per_n": {}, "thresholds": {key: THRESHOLDS[key] for key in
                                          ("distance_ks", "median_shift_rel", "w_coupling_ks")}}
    for n, (shifted, w_graph) in per_n.items():
        entry = {"samples": int(shifted.size)}
        if shifted.size:
            entry.update(ks_limit=stats.ks_two_sample(shifted, limit),
                         median_weight=float(np.median(shifted) + math.log(n) / k.lam),
                         mean_shifted=float(np.mean(shifted)))
        if w_graph.size:
            entry["ks_w_coupling"] = stats.ks_two_sample(w_graph, w_u)
        report["per_n"][n] = entry
    n_top = cfg.n_list[-1]
    top = report["per_n"][n_top]
    passes = {
        "ks_limit": bool(top.get("ks_limit") and top["ks_limit"].statistic < THRESHOLDS["distance_ks"]),
        "w_coupling": bool(top.get("ks_w_coupling") and top["ks_w_coupling"].statistic < THRESHOLDS["w_coupling_ks"]),
    }
    shifts = []
    for a, b in zip(cfg.n_list[:-1], cfg.n_list[1:]):
        if "median_weight" not in report["per_n"][a] or "median_weight" not in report["per_n"][b]:
            continue
        got = report["per_n"][b]["median_weight"] - report["per_n"][a]["median_weight"]
        want = math.log(b / a) / k.lam
        shifts.append({"from": a, "to": b, "shift": got, "expected": want,
                       "rel_error": abs(got - want) / want})
    report["median_shift"] = shifts
    if shifts:
        passes["median_shift"] = all(s["rel_error"] < THRESHOLDS["median_shift_rel"] for s in shifts)
    report["limit_draws"] = m
    report["pass"] = passes
    report["runtime_s"] = time.perf_counter() - t0
    return report


def run_hopcount(cfg, workers=1, _run=None):
    run = _run or _Run(cfg, workers)
    k = run.k
    t0 = time.perf_counter()
    rows, report = [], {"per_n": {}, "thresholds": {key: THRESHOLDS[key] for key in
                                                    ("hop_mean_rel", "hop_var_rel", "hop_ks")}}
    additive_ok = True
    for n in cfg.n_list:
        c = hopcount_centering(k, n)
        hops = []
        for rep, recs in run.pairs(n):
            for i, _, _, _, h, _, additive in recs:
                z = (h - c) / math.sqrt(c)
                rows.append((n, rep, i, h, z))
                hops.append(h)
                additive_ok &= bool(additive)
        hops = np.array(hops, dtype=float)
        if not hops.size:
            report["per_n"][n] = {"samples": 0}
            continue
        z = (hops - c) / math.sqrt(c)
        # hopcounts live on a lattice of spacing 1/sqrt(c) in z; a uniform
        # jitter on (-1/2, 1/2) hops is the continuity correction for KS
        jitter = stream(cfg.master_seed, "hopcount.jitter", n).random(hops.size) - 0.5
        z_cc = (hops + jitter - c) / math.sqrt(c)
        report["per_n"][n] = {
            "samples": int(hops.size),
            "centering": c,
            "mean": float(hops.mean()),
            "variance": float(hops.var(ddof=1)) if hops.size > 1 else float("nan"),
            "mean_rel_error": abs(hops.mean() - c) / c,
            "var_rel_error": abs(hops.var(ddof=1) - c) / c if hops.size > 1 else float("nan"),
            "ks_normal": stats.ks_one_sample(z_cc, stats.normal_cdf),
            "ks_normal_raw_lattice": stats.ks_one_sample(z, stats.normal_cdf),
        }
    write_csv(run.path("hopcount.csv"), ["n", "rep", "pair", "hops", "standardized"], rows)
    top = report["per_n"][cfg.n_list[-1]]
    report["pass"] = {
        "mean": bool(top.get("mean_rel_error", 1) < THRESHOLDS["hop_mean_rel"]),
        "variance": bool(top.get("var_rel_error", 1) < THRESHOLDS["hop_var_rel"]),
        "ks_normal": bool(top.get("ks_normal") and top["ks_normal"].statistic < THRESHOLDS["hop_ks"]),
        "additive_decomposition": additive_ok,
    }
    report["runtime_s"] = time.perf_counter() - t0
    return report


def default_t_grid(k):
    return (-4.0 / k.lam, 4.0 / k.lam, 0.1 / k.lam)


def make_t_grid(grid):
    t0, t1, dt = grid
    m = int(math.floor((t1 - t0) / dt + 1e-9)) + 1
    return t0 + dt * np.arange(m)


def epidemic_table(k, theta_needed):
    """MGF table whose range covers ``theta_needed``, keeping the default grid spacing."""
    base = mgf.SolverConfig()
    theta_max = max(base.theta_max, theta_needed)
    lin_spacing = (base.theta_max - 1.0) / (base.grid_points * (1 - base.geometric_fraction))
    extra = int(math.ceil((theta_max - base.theta_max) / lin_spacing))
    n_geo = int(base.grid_points * base.geometric_fraction)
    points = base.grid_points + extra
    cfg = mgf.SolverConfig(theta_max=theta_max, grid_points=points,
                           geometric_fraction=n_geo / points)
    return mgf.solve(k, cfg)


MAX_THETA = 2000.0


def run_epidemic(cfg, workers=1, _run=None):
    run = _run or _Run(cfg, workers)
    k = run.k
    t0 = time.perf_counter()
    grid = make_t_grid(cfg.t_grid or default_t_grid(k))

    n_sources = cfg.reps * cfg.pairs_per_graph
    W = run.w_limit("epidemic", cfg.bp_reps or max(2000, n_sources))
    need = float(x_of_t(k, grid[-1]) * W.max()) * 1.01
    if need > MAX_THETA:
        keep = x_of_t(k, grid) * W.max() <= MAX_THETA
        log.warning("epidemic grid truncated to t <= %.4g (MGF range)", grid[keep][-1])
        grid = grid[keep]
        need = MAX_THETA
    table = epidemic_table(k, need)
    write_csv(run.path("fcurve.csv"), ["t", "f"],
              [(t, f) for t, f in zip(grid, np.clip(mgf.f_curve(table, grid), 0.0, 1.0))])
    # f(t + log W / lam) = 1 - F_B(x(t) W)
    theo = 1.0 - table(np.outer(W, x_of_t(k, grid)), "F_B")

    rows, report = [], {"per_n": {}, "limit_draws": int(W.size),
                        "thresholds": {key: THRESHOLDS[key] for key in
                                       ("epidemic_mean_sup", "epidemic_ks", "epidemic_window")}}
    report["t_grid"] = [float(grid[0]), float(grid[-1]), int(grid.size)]
    for n in cfg.n_list:
        curves, w_n = [], []
        for rep, recs in run.gather("epidemic", epidemic_rep, n, (tuple(grid.tolist()),)):
            for i, s, curve, wn in recs:
                rows.extend((n, rep, i, t, y) for t, y in zip(grid, curve))
                curves.append(curve)
                w_n.append(wn)
        if not curves:
            report["per_n"][n] = {"sources": 0}
            continue
        I = np.array(curves)
        monotone = bool(np.all(np.diff(I, axis=1) >= 0) and I.min() >= 1.0 / n and I.max() <= 1.0)
        mean_gap = np.abs(I.mean(axis=0) - theo.mean(axis=0))
        f_mean = theo.mean(axis=0)
        lo, hi = THRESHOLDS["epidemic_window"]
        central = (f_mean >= lo) & (f_mean <= hi)
        ks = [stats.ks_two_sample(I[:, j], theo[:, j]).statistic for j in range(grid.size)]
        paired = 1.0 - table(np.outer(np.array(w_n), x_of_t(k, grid)), "F_B") \
            if np.array(w_n).max() * x_of_t(k, grid[-1]) <= table.theta[-1] else None
        report["per_n"][n] = {
            "sources": int(I.shape[0]),
            "monotone_in_range": monotone,
            "mean_sup_distance": float(mean_gap.max()),
            "mean_sup_at_t": float(grid[int(mean_gap.argmax())]),
            "ks_per_t": [float(x) for x in ks],
            "ks_max_central": float(max(np.array(ks)[central])) if central.any() else float("nan"),
            "central_window": [float(grid[central][0]), float(grid[central][-1])] if central.any() else None,
            "paired_proxy_sup_distance": None if paired is None
            else float(np.abs(I - paired).mean(axis=0).max()),
        }
    write_csv(run.path("epidemic.csv"), ["n", "rep", "source", "t", "I_n"], rows)
    top = report["per_n"][cfg.n_list[-1]]
    report["pass"] = {
        "mean_curve": bool(top.get("mean_sup_distance", 1) < THRESHOLDS["epidemic_mean_sup"]),
        "ks_central": bool(top.get("ks_max_central", 1) < THRESHOLDS["epidemic_ks"]),
        "monotone": all(v.get("monotone_in_range", False) for v in report["per_n"].values()),
    }
    report["runtime_s"] = time.perf_counter() - t0
    return report


def color_pair_probs(k):
    p = np.array([k.pi_B**2, k.pi_B * k.pi_R, k.pi_B * k.pi_R, 0.5 * k.pi_R**2])
    return p / k.collision_factor


def run_collision(cfg, workers=1, _run=None):
    run = _run or _Run(cfg, workers)
    k = run.k
    t0 = time.perf_counter()
    s0, s1 = cfg.s_window or (-1.0 / k.lam, 1.0 / k.lam)
    expected = k.collision_factor * (math.exp(k.lam * s1) - math.exp(k.lam * s0)) / k.lam
    probs = color_pair_probs(k)
    rows = []
    report = {"per_n": {}, "window": [s0, s1], "expected_normalized_count": expected,
              "color_pair_probs": dict(zip(fpp.COLOR_PAIRS, probs)),
              "thresholds": {key: THRESHOLDS[key] for key in
                             ("collision_rel", "collision_chi2_p", "collision_stability_z")}}
    for n in cfg.n_list:
        norm, counts, ww = [], [], []
        pair_counts = dict.fromkeys(fpp.COLOR_PAIRS, 0)
        direct = incomplete = 0
        for rep, recs in run.gather("collision", collision_rep, n, (s0, s1)):
            for rec in recs:
                if rec["direct"]:
                    direct += 1
                    continue
                rows.extend((n, rep, s, cp, r) for s, cp, r in rec["log"])
                incomplete += not rec["complete"]
                prod = rec["w_u"] * rec["w_v"]
                norm.append(rec["count"] / prod)
                counts.append(rec["count"])
                ww.append(prod)
                for cp in rec["pairs"]:
                    pair_counts[cp] += 1
        norm = np.array(norm)
        if not norm.size:
            report["per_n"][n] = {"instances": 0, "direct": direct}
            continue
        mean = float(norm.mean())
        se = float(norm.std(ddof=1) / math.sqrt(norm.size)) if norm.size > 1 else float("nan")
        obs = [pair_counts[cp] for cp in fpp.COLOR_PAIRS]
        chi = stats.chi_square(obs, probs) if sum(obs) else (float("nan"), 0.0)
        report["per_n"][n] = {
            "instances": int(norm.size),
            "direct": direct,
            "incomplete_logs": incomplete,
            "mean_normalized_count": mean,
            "se": se,
            "rel_error": abs(mean - expected) / expected,
            "ratio_of_sums": float(np.sum(counts) / np.sum(ww)),
            "color_pair_counts": dict(zip(fpp.COLOR_PAIRS, obs)),
            "chi2": chi[0],
            "chi2_p": chi[1],
        }
    write_csv(run.path("collision.csv"), ["n", "rep", "s", "color_pair", "remaining"], rows)
    top = report["per_n"][cfg.n_list[-1]]
    passes = {
        "intensity": bool(top.get("rel_error", 1) < THRESHOLDS["collision_rel"]),
        "color_pairs": bool(top.get("chi2_p", 0) > THRESHOLDS["collision_chi2_p"]),
    }
    stability = []
    for a, b in zip(cfg.n_list[:-1], cfg.n_list[1:]):
        ra, rb = report["per_n"][a], report["per_n"][b]
        if not ra.get("instances") or not rb.get("instances"):
            continue
        z = (rb["mean_normalized_count"] - ra["mean_normalized_count"]) / math.hypot(ra["se"], rb["se"])
        stability.append({"from": a, "to": b, "z": z})
    report["stability"] = stability
    if stability:
        passes["n_stability"] = all(abs(s["z"]) < THRESHOLDS["collision_stability_z"] for s in stability)
    report["pass"] = passes
    report["runtime_s"] = time.perf_counter() - t0
    return report


RUNNERS = {"distance": run_distance, "hopcount": run_hopcount,
           "epidemic": run_epidemic, "collision": run_collision}


def run_config(cfg, workers=1):
    run = _Run(cfg, workers)
    t0 = time.perf_counter()
    reports = {}
    for name in cfg.experiment:
        log.info("running %s", name)
        reports[name] = RUNNERS[name](cfg, workers, _run=run)
    flags = {f"{name}.{key}": val for name, rep in reports.items() for key, val in rep["pass"].items()}
    flags["all_reps_ok"] = not run.failures
    summary = {
        "config": cfg.as_json(),
        "constants": run.k.as_dict(),
        "seeds": {"master_seed": cfg.master_seed,
                  "derivation": "(master_seed, family, n, rep); families pairs/epidemic/collision"},
        "experiments": reports,
        "failed_reps": run.failures,
        "pass": flags,
        "all_pass": all(flags.values()),
        "runtime_s": time.perf_counter() - t0,
    }
    with open(run.path("summary.json"), "w") as fh:
        json.dump(_jsonable(summary), fh, indent=2)
        fh.write("\n")
    return summary


def run_campaign(path, workers=1):
    """Run a JSON config file; returns (summary, exit code)."""
    cfg = ExperimentConfig.from_file(path)
    summary = run_config(cfg, workers)
    return summary, 0 if summary["all_pass"] else 1
