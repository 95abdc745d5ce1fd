"""Acceptance criteria at their pinned tolerances.

Each test records one PASS/FAIL line, printed in the terminal summary, and then
asserts.  The campaign criteria load the configs under ``scripts/configs`` and
write into a temporary directory.
"""
import hashlib
import json
import math
from pathlib import Path

import numpy as np
import pytest

from conftest import brute_force_distance, random_graph, record_criterion
from nwfpp import cmbp, experiments, fpp, mgf, theory
from nwfpp.theory import constants, mean_matrix

CONFIGS = Path(__file__).resolve().parents[1] / "scripts" / "configs"


def load_config(name, out):
    d = json.loads((CONFIGS / name).read_text())
    d["output_dir"] = str(out)
    return experiments.ExperimentConfig.from_dict(d)


def _check(number, name, parts):
    """``parts`` maps a label to (passed, detail)."""
    ok = all(p for p, _ in parts.values())
    detail = "; ".join(f"{label} {d}" for label, (_, d) in parts.items())
    record_criterion(number, name, ok, detail)
    failed = [label for label, (p, _) in parts.items() if not p]
    assert ok, f"failed: {failed} ({detail})"


@pytest.fixture(scope="module")
def distance_campaign(tmp_path_factory):
    cfg = load_config("distance.json", tmp_path_factory.mktemp("distance"))
    return experiments.run_config(cfg)


def test_01_eigen_identities():
    worst = 0.0
    gap_ok = True
    for rho in (0.1, 0.5, 1, 2, 5, 10):
        k = constants(rho)
        worst = max(worst,
                    abs(theory.char_poly(rho, k.lam)),
                    np.max(np.abs(k.pi @ k.Q - k.lam * k.pi)),
                    np.max(np.abs(k.Q @ k.u - k.lam * k.u)),
                    abs(k.pi @ k.u - 1.0))
        gap_ok &= 2 * k.lam2 < k.lam
    _check(1, "eigen-identities", {
        "max defect": (worst < 1e-12, f"{worst:.2e} < 1e-12"),
        "2*lam2 < lam": (gap_ok, str(gap_ok)),
    })


def test_02_oracle_equivalence():
    rng = np.random.default_rng(2)
    brute_bad = 0
    for i in range(200):
        n = int(rng.integers(3, 9))
        g = random_graph(n, float(rng.uniform(0.2, 4.0)), 1000 + i)
        u, v = (int(x) for x in rng.choice(n, 2, replace=False))
        if fpp.distance(g, u, v).weight != pytest.approx(brute_force_distance(g, u, v), abs=1e-12):
            brute_bad += 1
    k = constants(2.0)
    tf = fpp.default_t_freeze(k, 1000)
    worst = 0.0
    for i in range(1000):
        g = random_graph(1000, 2.0, 5000 + i)
        u, v = (int(x) for x in rng.choice(1000, 2, replace=False))
        worst = max(worst, abs(fpp.collision_connect(g, u, v, tf).weight - fpp.distance(g, u, v).weight))
    _check(2, "oracle equivalence", {
        "brute force mismatches": (brute_bad == 0, f"{brute_bad}/200"),
        "collision vs distance max gap": (worst < 1e-9, f"{worst:.1e}"),
    })


def test_03_cmbp_means():
    k1 = constants(1.0)
    worst_z = 0.0
    for j, t in enumerate((0.5, 1.0, 2.0)):
        ar, ab = cmbp.alive_at(1.0, t, 10**5, root="blue", seed=30 + j, start="particle")
        mean = mean_matrix(k1, t)[cmbp.BLUE]
        for x, m in ((ar, mean[0]), (ab, mean[1])):
            worst_z = max(worst_z, abs(x.mean() - m) / (x.std(ddof=1) / math.sqrt(x.size)))
    k2 = constants(2.0)
    m = 10**5
    tr = cmbp.simulate(2.0, "blue", at_splits=m, seed=31)
    frac = tr.dead_counts()[0] / m
    ratio = m * math.exp(-k2.lam * tr.T[-1]) * k2.lam / cmbp.martingale_W(tr, k2)
    _check(3, "branching process means", {
        "max |z| vs exp(Qt)": (worst_z < 3, f"{worst_z:.2f} < 3"),
        "N_R/m - pi_R": (abs(frac - k2.pi_R) < 0.01, f"{abs(frac - k2.pi_R):.4f} < 0.01"),
        "m e^(-lam T_m) lam/W": (0.95 <= ratio <= 1.05, f"{ratio:.4f} in [0.95, 1.05]"),
    })


@pytest.mark.slow
def test_04_w_pipeline(distance_campaign):
    k = constants(1.0)
    W = cmbp.sample_W(1.0, "blue", reps=10**4, seed=40, start="particle")
    z = abs(W.mean() - k.u_B) / (W.std(ddof=1) / math.sqrt(W.size))
    top = distance_campaign["config"]["n_list"][-1]
    ks = distance_campaign["experiments"]["distance"]["per_n"][top]["ks_w_coupling"]
    _check(4, "martingale limit pipeline", {
        "|z| of mean W vs u_B": (z < 3, f"{z:.2f} < 3"),
        f"KS W^(n) vs W at n={top} (n_eff {ks.n_eff:.0f})": (ks.statistic < 0.05, f"{ks.statistic:.4f} < 0.05"),
    })


def test_05_mgf_solver():
    parts = {}
    for rho in (1.0, 2.0):
        k = constants(rho)
        table = mgf.solve(k)
        W = cmbp.sample_W(rho, "blue", reps=10**4, seed=50, start="particle")
        th = np.linspace(0.0, 5.0, 101)
        sup = float(np.max(np.abs(mgf.empirical_mgf(W, th) - table(th, "M_B"))))
        slope = table.mean("M_B")
        parts[f"rho={rho:g} residual"] = (table.residual < 1e-10, f"{table.residual:.2e} < 1e-10")
        parts[f"rho={rho:g} M(0)"] = (table.M_B[0] == 1.0 and table.M_R[0] == 1.0, f"{table.M_B[0]:g}")
        parts[f"rho={rho:g} slope err"] = (abs(slope - k.u_B) < 1e-3, f"{abs(slope - k.u_B):.1e}")
        parts[f"rho={rho:g} empirical sup"] = (sup < 0.02, f"{sup:.4f} < 0.02")
    _check(5, "MGF solver", parts)


@pytest.mark.slow
def test_06_distances(distance_campaign):
    rep = distance_campaign["experiments"]["distance"]
    top = distance_campaign["config"]["n_list"][-1]
    ks = rep["per_n"][top]["ks_limit"]
    (shift,) = rep["median_shift"]
    _check(6, "distance limit law", {
        f"KS at n={top} ({rep['per_n'][top]['samples']} pairs)": (ks.statistic < 0.1, f"{ks.statistic:.4f} < 0.1"),
        "median shift rel. error": (shift["rel_error"] < 0.10, f"{shift['rel_error']:.3f} < 0.10"),
    })


@pytest.mark.slow
def test_07_hopcount(distance_campaign):
    top = distance_campaign["config"]["n_list"][-1]
    r = distance_campaign["experiments"]["hopcount"]["per_n"][top]
    _check(7, "hopcount CLT", {
        "mean rel. error": (r["mean_rel_error"] < 0.10, f"{r['mean_rel_error']:.3f} < 0.10"),
        "variance rel. error": (r["var_rel_error"] < 0.25, f"{r['var_rel_error']:.3f} < 0.25"),
        "KS vs normal": (r["ks_normal"].statistic < 0.1,
                         f"{r['ks_normal'].statistic:.4f} < 0.1 (raw lattice "
                         f"{r['ks_normal_raw_lattice'].statistic:.3f})"),
    })


@pytest.mark.slow
def test_08_epidemic(tmp_path):
    summary = experiments.run_config(load_config("epidemic.json", tmp_path))
    top = summary["config"]["n_list"][-1]
    r = summary["experiments"]["epidemic"]["per_n"][top]
    _check(8, "epidemic curve", {
        f"mean sup distance ({r['sources']} sources)": (r["mean_sup_distance"] < 0.05,
                                                        f"{r['mean_sup_distance']:.4f} < 0.05"),
        "max KS in central window": (r["ks_max_central"] < 0.15, f"{r['ks_max_central']:.4f} < 0.15"),
        "curves monotone": (r["monotone_in_range"], str(r["monotone_in_range"])),
    })


@pytest.mark.slow
def test_09_collisions(tmp_path):
    summary = experiments.run_config(load_config("collision.json", tmp_path))
    rep = summary["experiments"]["collision"]
    top = summary["config"]["n_list"][-1]
    r = rep["per_n"][top]
    (stab,) = rep["stability"]
    _check(9, "collision point process", {
        f"chi2 p ({r['instances']} instances)": (r["chi2_p"] > 0.01, f"{r['chi2_p']:.3f} > 0.01"),
        "intensity rel. error": (r["rel_error"] < 0.15, f"{r['rel_error']:.3f} < 0.15"),
        "doubling |z|": (abs(stab["z"]) < 3, f"{abs(stab['z']):.2f} < 3"),
    })


def _digests(folder):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(Path(folder).glob("*.csv"))}


def test_10_determinism(tmp_path):
    runs = []
    for name, workers in (("a", 1), ("b", 1), ("c", 2)):
        experiments.run_config(load_config("smoke.json", tmp_path / name), workers)
        runs.append(_digests(tmp_path / name))
    same_rerun = runs[0] == runs[1]
    same_workers = runs[0] == runs[2]
    _check(10, "determinism", {
        f"rerun identical ({len(runs[0])} CSVs)": (same_rerun, str(same_rerun)),
        "1 vs 2 workers identical": (same_workers, str(same_workers)),
    })
