"""Acceptance gate: one test per release criterion, one verdict line each.

Run `pytest tests/test_acceptance.py -v -s` to see the ACCEPTANCE lines.
Criteria 1-3 need the public benchmark collections on disk; when they
have not been fetched (this sandbox blocks the download host) those
tests skip loudly with the fetch command to run instead of passing
vacuously.
"""

import numpy as np
import pytest
import scipy.stats
from conftest import (
    brute_assortativity,
    brute_best_split,
    brute_triangles,
    random_graph,
)

from netclass import datasets
from netclass.bipartite import ThresholdedBipartite, project
from netclass.cli import main as cli_main
from netclass.evaluate import ClassifierConfig, cross_validate
from netclass.features import degree_assortativity, num_triangles
from netclass.forest import train_forest
from netclass.kmeans import kmeans
from netclass.matrix import column_medians, impute
from netclass.pipeline import build_feature_matrix
from netclass.stats import NULL_RATE, fit_lognormal, ks_two_sample
from netclass.study import StudyConfig, run_subsampling_study
from netclass.synth import SynthConfig, generate_synthetic_cdr
from netclass.tree import gini_split


def verdict(criterion: str, ok: bool, detail: str) -> None:
    print(f"\nACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} ({detail})",
          flush=True)
    assert ok, f"{criterion}: {detail}"


def skip_missing(criterion: str, name: str) -> None:
    reason = (
        f"{name} not on disk; run `netclass fetch --dataset {name}` "
        "(download host unreachable from this sandbox)"
    )
    print(f"\nACCEPTANCE {criterion}: SKIP ({reason})", flush=True)
    pytest.skip(reason)


def benchmark_features(name: str):
    return build_feature_matrix("benchmark6", datasets.load(name))


# -- criterion 1: benchmark random-forest accuracy --------------------------------


@pytest.mark.parametrize(
    "name,expected,tol",
    [
        ("IMDB-BINARY", 72.4, 5.0),
        ("IMDB-MULTI", 47.8, 4.0),
        ("REDDIT-BINARY", 88.7, 3.0),
        ("COLLAB", 76.5, 3.0),
    ],
)
def test_criterion_1_benchmark_rf(name, expected, tol):
    if datasets.locate(name) is None:
        skip_missing(f"1 [{name}]", name)
    features = benchmark_features(name)
    res = cross_validate(
        features,
        ClassifierConfig(kind="rf", n_trees=500),
        n_folds=10,
        seed=0,
    )
    acc = 100.0 * res.mean_accuracy
    verdict(
        f"1 [{name}]",
        abs(acc - expected) <= tol,
        f"rf 10-fold accuracy {acc:.2f}% vs {expected}+-{tol}",
    )


# -- criterion 2: standardized nearest neighbors -----------------------------------


@pytest.mark.parametrize(
    "name,expected,tol",
    [("REDDIT-BINARY", 87.63, 3.0), ("COLLAB", 72.69, 3.0)],
)
def test_criterion_2_knn(name, expected, tol):
    if datasets.locate(name) is None:
        skip_missing(f"2 [{name}]", name)
    features = benchmark_features(name)
    best_k, best_acc = None, -1.0
    for k in (3, 5, 7, 9):
        res = cross_validate(
            features, ClassifierConfig(kind="knn", k=k), n_folds=10, seed=0
        )
        acc = 100.0 * res.mean_accuracy
        if abs(acc - expected) <= tol and best_k is None:
            best_k, best_acc = k, acc
        best_acc = max(best_acc, acc)
    verdict(
        f"2 [{name}]",
        best_k is not None,
        f"knn 10-fold accuracy vs {expected}+-{tol}: "
        f"met at k={best_k} ({best_acc:.2f}%)" if best_k is not None
        else f"no k in (3,5,7,9) reached it (best {best_acc:.2f}%)",
    )


# -- criterion 3: forest vs neighbors gap ------------------------------------------


def test_criterion_3_rf_beats_knn_on_imdb_binary():
    name = "IMDB-BINARY"
    if datasets.locate(name) is None:
        skip_missing("3", name)
    features = benchmark_features(name)
    rf = cross_validate(
        features, ClassifierConfig(kind="rf", n_trees=500), n_folds=10, seed=0
    )
    knn = cross_validate(
        features, ClassifierConfig(kind="knn", k=5), n_folds=10, seed=0
    )
    gap = 100.0 * (rf.mean_accuracy - knn.mean_accuracy)
    verdict("3", gap >= 10.0, f"rf - knn(k=5) gap {gap:.2f} points")


# -- criterion 4: synthetic substitutes for the proprietary experiments ------------


def synth_cv(cfg, seed=5, n_trees=500):
    days = generate_synthetic_cdr(cfg, seed=seed).days
    features = build_feature_matrix("cdr", days)
    res = cross_validate(
        features,
        ClassifierConfig(kind="rf", n_trees=n_trees),
        n_folds=10,
        seed=seed,
    )
    return features, res


def test_criterion_4a_distinct_regimes():
    _, res = synth_cv(SynthConfig(n_days=70))
    acc = res.mean_accuracy
    ok_acc = acc > 0.95

    # mixing-driven profile: the injected signal lives in same-zip mixing,
    # so FracSameZip must surface near the top of the importances
    features, res2 = synth_cv(SynthConfig.study(n_days=70))
    model = train_forest(
        impute(features, column_medians(features)), n_trees=500, seed=5
    )
    top3 = [
        model.feature_names[i] for i in np.argsort(model.importances)[::-1][:3]
    ]
    ok_imp = res2.mean_accuracy > 0.95 and "FracSameZip" in top3
    verdict(
        "4a",
        ok_acc and ok_imp,
        f"distinct acc {acc:.3f}, mixing acc {res2.mean_accuracy:.3f}, "
        f"top-3 importances {top3}",
    )


def test_criterion_4b_identical_regimes_null():
    _, res = synth_cv(SynthConfig.identical_regimes(n_days=70))
    gap = abs(res.mean_accuracy - NULL_RATE)
    verdict(
        "4b",
        gap <= 3.0 * res.sd,
        f"accuracy {res.mean_accuracy:.4f} vs null {NULL_RATE:.4f} "
        f"(|gap| {gap:.4f} <= 3 sd = {3 * res.sd:.4f})",
    )


def test_criterion_4c_subsampling_study_recovers_interaction():
    synth = generate_synthetic_cdr(SynthConfig.study(n_days=140), seed=0)
    result = run_subsampling_study(synth, StudyConfig(n_perm=1000, seed=0))
    verdict(
        "4c",
        result.lad.beta2 != 0.0 and result.pvalue < 0.01,
        f"beta2 {result.lad.beta2:.4f}, permutation p {result.pvalue:.4f} "
        f"({len(result.table)} subsamples)",
    )


# -- criterion 5: brute-force oracle suites ----------------------------------------


def test_criterion_5_triangles_oracle(rng):
    checked = 0
    for _ in range(1000):
        g = random_graph(rng, max_nodes=30)
        assert num_triangles(g) == brute_triangles(g)
        checked += 1
    verdict("5 [triangles]", checked == 1000, f"{checked} graphs <= 30 nodes")


def test_criterion_5_assortativity_oracle(rng):
    checked = worst = 0
    for _ in range(1000):
        g = random_graph(rng, max_nodes=30)
        ours = degree_assortativity(g)
        ref = brute_assortativity(g)
        if ref is None:
            assert ours.degenerate
            continue
        worst = max(worst, abs(ours.value - ref))
        checked += 1
    verdict(
        "5 [assortativity]",
        checked > 300 and worst < 1e-9,
        f"{checked} non-degenerate graphs, max |delta| {worst:.2e}",
    )


def test_criterion_5_split_oracle(rng):
    checked = 0
    for _ in range(400):
        n = int(rng.integers(2, 9))
        p = int(rng.integers(1, 4))
        c = int(rng.integers(2, 4))
        x = rng.integers(0, 5, size=(n, p)).astype(np.float64)
        y = rng.integers(1, c + 1, size=n)
        got = gini_split(x, y, list(range(p)), c)
        want = brute_best_split(x, y, c)
        assert got == want, (x, y, got, want)
        checked += 1
    verdict("5 [splits]", checked == 400, f"{checked} datasets <= 8 points")


def test_criterion_5_projection_oracle(rng):
    checked = 0
    for _ in range(300):
        nl = int(rng.integers(1, 10))
        nr = int(rng.integers(1, 10))
        b = rng.random((nl, nr)) < rng.uniform(0.1, 0.7)
        tb = ThresholdedBipartite(
            left_ids=tuple(f"l{i}" for i in range(nl)),
            right_ids=tuple(f"r{j}" for j in range(nr)),
            edges=b,
        )
        for side, mat in (("left", b), ("right", b.T)):
            g = project(tb, side)
            prod = (mat.astype(int) @ mat.astype(int).T) > 0
            np.fill_diagonal(prod, False)
            got = {tuple(sorted(e)) for e in g.edge_id_pairs()}
            prefix = side[0]
            want = {
                tuple(sorted((f"{prefix}{i}", f"{prefix}{j}")))
                for i, j in zip(*np.nonzero(prod))
                if i < j
            }
            assert got == want
        checked += 1
    verdict("5 [projection]", checked == 300, f"{checked} biadjacency matrices")


def test_criterion_5_kmeans_monotone(rng):
    checked = 0
    for seed in range(100):
        x = rng.normal(size=(int(rng.integers(10, 60)), int(rng.integers(1, 5))))
        model = kmeans(x, k=int(rng.integers(1, 6)), n_restarts=1, seed=seed)
        h = np.asarray(model.objective_history)
        assert np.all(np.diff(h) <= 1e-9), h
        checked += 1
    verdict("5 [kmeans]", checked == 100, f"{checked} seeded runs monotone")


# -- criterion 6: lognormal fit recovery and KS calibration -------------------------


def test_criterion_6_lognormal_ci_coverage():
    mu, sigma = 1.794, 0.693
    hits = 0
    for child in np.random.SeedSequence(1).spawn(100):
        draws = np.random.default_rng(child).lognormal(mu, sigma, 100_000)
        fit = fit_lognormal(draws)
        hits += (
            fit.ci_mu[0] <= mu <= fit.ci_mu[1]
            and fit.ci_sigma[0] <= sigma <= fit.ci_sigma[1]
        )
    verdict("6 [coverage]", hits >= 90, f"{hits}/100 trials covered (1.794, 0.693)")


def test_criterion_6_ks_null_uniformity():
    rng = np.random.default_rng(99)
    pvalues = [
        ks_two_sample(rng.normal(size=687), rng.normal(size=800))[1]
        for _ in range(300)
    ]
    p = scipy.stats.kstest(pvalues, "uniform").pvalue
    verdict("6 [ks-null]", p >= 0.01, f"uniformity test on 300 null p-values: p {p:.4f}")


# -- criterion 7: byte-identical evaluation runs ------------------------------------


def test_criterion_7_deterministic_predictions(tmp_path):
    def run(tag, threads):
        out = tmp_path / tag
        argv = [
            "eval", "--synth", "--profile", "study", "--days", "28",
            "--trees", "200", "--folds", "5", "--seed", "11", "--out", str(out),
        ]
        if threads is not None:
            argv += ["--threads", str(threads)]
        assert cli_main(argv) == 0
        return (out / "predictions.csv").read_bytes()

    first = run("a", 1)
    second = run("b", 1)
    third = run("c", 4)
    verdict(
        "7",
        first == second == third,
        f"predictions.csv identical across reruns and thread counts "
        f"({len(first)} bytes)",
    )
