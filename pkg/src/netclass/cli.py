"""Command-line interface.

Subcommands: fetch, extract, eval, importance, fit-dist, sample,
sampling-regression, synth-cdr. Global flags --seed, --threads, --out
are accepted by every subcommand. Exit codes: 0 success, 2 bad
configuration (also used by argument parsing), 3 bad or missing data.

An eval run writes one directory: config.json (frozen arguments),
features.csv, report.json (accuracies, confusion, timing), and
predictions.csv; random-forest runs add importances.csv. With a fixed
seed the run is deterministic: predictions.csv is byte-identical across
repeats and thread counts (timing lives only in report.json).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__, datasets
from .bipartite import DEFAULT_THRESHOLD_PERCENTILE, threshold_collection
from .errors import ConfigError, DataError
from .evaluate import (
    ClassifierConfig,
    cross_validate,
    evaluate_split,
    redundant_features,
    split_by_parity,
)
from .forest import DEFAULT_TREES, train_forest
from .graph import (
    GraphCollection,
    load_bipartite_matrix,
    load_edge_list,
    write_edge_list,
    write_node_attributes,
)
from .matrix import column_medians, impute, write_features_csv
from .pipeline import FEATURE_SETS, build_feature_matrix
from .sampling import attribute_subsample, induce, snowball
from .stats import fit_lognormal, lognormal_pdf, permutation_test_beta2
from .study import StudyConfig, run_subsampling_study
from .synth import SynthConfig, generate_synthetic_cdr

SYNTH_PROFILES = ("distinct", "identical", "study")


def _synth_config(profile: str, n_days: int, label_mode: str) -> SynthConfig:
    kw = {"n_days": n_days, "label_mode": label_mode}
    if profile == "distinct":
        return SynthConfig(**kw)
    if profile == "identical":
        return SynthConfig.identical_regimes(**kw)
    if profile == "study":
        return SynthConfig.study(**kw)
    raise ConfigError(f"profile must be one of {SYNTH_PROFILES}, got {profile!r}")


def _read_labels_csv(path, ids) -> np.ndarray:
    """graph_id,label CSV -> labels aligned to ids, remapped to 1..c."""
    frame = pd.read_csv(path, dtype={"graph_id": str})
    for col in ("graph_id", "label"):
        if col not in frame.columns:
            raise DataError(f"{path}: missing column {col!r}")
    mapping = dict(zip(frame["graph_id"], frame["label"]))
    missing = [i for i in ids if i not in mapping]
    if missing:
        raise DataError(f"{path}: no label for {missing[:5]}")
    raw = np.asarray([mapping[i] for i in ids])
    distinct = np.unique(raw)
    return (np.searchsorted(distinct, raw) + 1).astype(np.int64)


def _read_id_list(path) -> list[str]:
    out = []
    with open(path) as fh:
        for line in fh:
            token = line.split("#", 1)[0].strip()
            if token:
                out.append(token)
    return out


def _load_unipartite(args) -> GraphCollection:
    if getattr(args, "tu", None):
        return datasets.load(args.tu, args.data)
    if getattr(args, "graphs", None):
        directory = Path(args.graphs)
        if not directory.is_dir():
            raise DataError(f"{directory}: not a directory")
        files = sorted(p for p in directory.iterdir() if p.is_file())
        if not files:
            raise DataError(f"{directory}: no graph files")
        graphs = [load_edge_list(p, attr_path=args.attributes) for p in files]
        ids = [p.stem for p in files]
        labels = _read_labels_csv(args.labels, ids) if args.labels else None
        return GraphCollection(graphs=graphs, ids=ids, labels=labels)
    if getattr(args, "synth", False):
        cfg = _synth_config(args.profile, args.days, args.label_mode)
        return generate_synthetic_cdr(cfg, seed=args.seed).days
    raise ConfigError("no input given: use --tu, --graphs, or --synth")


def _load_bipartite_samples(args):
    directory = Path(args.bipartite)
    if not directory.is_dir():
        raise DataError(f"{directory}: not a directory")
    files = sorted(p for p in directory.iterdir() if p.suffix == ".csv")
    if not files:
        raise DataError(f"{directory}: no .csv weight matrices")
    samples = [load_bipartite_matrix(p, graph_id=p.stem) for p in files]
    tbs = threshold_collection(samples, q=args.q)
    labels = None
    if args.labels:
        labels = _read_labels_csv(args.labels, [p.stem for p in files])
    return tbs, labels


def _build_features(args):
    feature_set = args.features
    if getattr(args, "bipartite", None):
        if feature_set not in (None, "bio"):
            raise ConfigError("bipartite input supports only the bio feature set")
        tbs, labels = _load_bipartite_samples(args)
        return build_feature_matrix("bio", tbs, labels=labels)
    if feature_set == "bio":
        raise ConfigError("bio features need --bipartite input")
    if feature_set is None:
        feature_set = "benchmark6" if getattr(args, "tu", None) else "cdr"
    return build_feature_matrix(feature_set, _load_unipartite(args))


def _out_dir(args, command: str) -> Path:
    out = Path(args.out) if args.out else Path(f"netclass-{command}")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_config(out: Path, args) -> None:
    doc = {
        k: (str(v) if isinstance(v, Path) else v)
        for k, v in vars(args).items()
        if k != "func"
    }
    doc["version"] = __version__
    with open(out / "config.json", "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)


def _write_json(path: Path, doc) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)


def _write_predictions(out, ids, y_true, y_pred, probs) -> None:
    frame = pd.DataFrame({"graph_id": list(ids)})
    if y_true is not None:
        frame["true_label"] = np.asarray(y_true, dtype=np.int64)
    frame["predicted"] = np.asarray(y_pred, dtype=np.int64)
    for c in range(probs.shape[1]):
        frame[f"prob_{c + 1}"] = probs[:, c]
    frame.to_csv(out / "predictions.csv", index=False)


def _write_importances(out, features, model) -> None:
    redundant = {name: partner for name, partner, _ in redundant_features(features)}
    order = np.argsort(model.importances)[::-1]
    frame = pd.DataFrame(
        {
            "feature": [model.feature_names[i] for i in order],
            "importance_pct": model.importances[order],
            "collinear_with": [
                redundant.get(model.feature_names[i], "") for i in order
            ],
        }
    )
    frame.to_csv(out / "importances.csv", index=False)


def _classifier_config(args) -> ClassifierConfig:
    return ClassifierConfig(
        kind=args.classifier,
        n_trees=args.trees,
        m=args.mtry,
        k=args.k,
        n_clusters=args.clusters,
        n_restarts=args.restarts,
        n_threads=args.threads,
    )


# -- subcommand implementations -----------------------------------------------


def cmd_fetch(args) -> None:
    for name in args.dataset:
        datasets.fetch(name, data_dir=args.data, url=args.url)


def cmd_extract(args) -> None:
    features = _build_features(args)
    out = _out_dir(args, "extract")
    _write_config(out, args)
    write_features_csv(out / "features.csv", features)
    print(f"wrote {features.n} x {features.p} feature matrix to {out / 'features.csv'}")


def cmd_eval(args) -> None:
    t0 = time.time()
    features = _build_features(args)
    if features.labels is None:
        raise ConfigError("evaluation needs labels (--labels or a labeled input)")
    out = _out_dir(args, "eval")
    _write_config(out, args)
    write_features_csv(out / "features.csv", features)
    cfg = _classifier_config(args)

    report = {
        "command": "eval",
        "classifier": args.classifier,
        "protocol": args.protocol,
        "seed": args.seed,
        "n_items": features.n,
        "n_features": features.p,
        "n_classes": features.n_classes,
    }
    if args.classifier == "knn":
        report["k"] = args.k
    if args.protocol == "cv":
        res = cross_validate(features, cfg, n_folds=args.folds, seed=args.seed)
        report.update(
            folds=args.folds,
            accuracy_mean=res.mean_accuracy,
            accuracy_sd=res.sd,
            accuracy_se=res.se,
            fold_accuracies=res.fold_accuracies,
            confusion=res.confusion.tolist(),
        )
        _write_predictions(
            out, features.row_ids, features.labels, res.predictions, res.probabilities
        )
        print(
            f"{args.classifier} {args.folds}-fold accuracy: "
            f"{100 * res.mean_accuracy:.2f}% (sd {100 * res.sd:.2f}, "
            f"se {100 * res.se:.2f})"
        )
    else:
        exclude = _read_id_list(args.exclude) if args.exclude else ()
        train_idx, test_idx = split_by_parity(features, exclude)
        res = evaluate_split(features, cfg, train_idx, test_idx, seed=args.seed)
        report.update(
            n_train=len(train_idx),
            n_test=len(test_idx),
            n_excluded=features.n - len(train_idx) - len(test_idx),
            accuracy=res.accuracy,
            misclassification_rate=res.misclassification_rate,
            confusion=res.confusion.tolist(),
        )
        _write_predictions(
            out,
            res.test_ids,
            features.take(test_idx).labels,
            res.predictions,
            res.probabilities,
        )
        print(
            f"{args.classifier} parity-split accuracy: {100 * res.accuracy:.2f}% "
            f"({len(train_idx)} train / {len(test_idx)} test)"
        )

    if args.classifier == "rf":
        full = impute(features, column_medians(features))
        model = train_forest(
            full, n_trees=args.trees, m=args.mtry, seed=args.seed,
            n_threads=args.threads,
        )
        _write_importances(out, features, model)
    report["elapsed_seconds"] = time.time() - t0
    _write_json(out / "report.json", report)


def cmd_importance(args) -> None:
    t0 = time.time()
    features = _build_features(args)
    if features.labels is None:
        raise ConfigError("importance needs labels")
    out = _out_dir(args, "importance")
    _write_config(out, args)
    write_features_csv(out / "features.csv", features)
    full = impute(features, column_medians(features))
    model = train_forest(
        full, n_trees=args.trees, m=args.mtry, seed=args.seed, n_threads=args.threads
    )
    _write_importances(out, features, model)
    _write_json(
        out / "report.json",
        {
            "command": "importance",
            "n_trees": args.trees,
            "m": model.m,
            "seed": args.seed,
            "importance_sum": float(model.importances.sum()),
            "elapsed_seconds": time.time() - t0,
        },
    )
    for name, pct in zip(
        np.asarray(model.feature_names)[np.argsort(model.importances)[::-1]],
        np.sort(model.importances)[::-1],
    ):
        print(f"{name:16s} {pct:6.2f}%")


def cmd_fit_dist(args) -> None:
    if args.model != "lognormal":
        raise ConfigError(f"unsupported model {args.model!r}")
    if args.edgelist:
        g = load_edge_list(args.edgelist)
        d = g.degrees()
        degrees = d[d > 0].astype(np.float64)
    elif args.degrees:
        values = []
        with open(args.degrees) as fh:
            for line_no, line in enumerate(fh, start=1):
                token = line.strip()
                if not token:
                    continue
                try:
                    values.append(float(token))
                except ValueError:
                    raise DataError(
                        f"{args.degrees}:{line_no}: not a number: {token!r}"
                    )
        degrees = np.asarray(values)
    else:
        raise ConfigError("fit-dist needs --degrees or --edgelist")
    fit = fit_lognormal(degrees, seed=args.seed)
    out = _out_dir(args, "fit-dist")
    _write_config(out, args)
    _write_json(
        out / "fit.json",
        {
            "model": "lognormal",
            "mu": fit.mu,
            "sigma": fit.sigma,
            "ci_mu": list(fit.ci_mu),
            "ci_sigma": list(fit.ci_sigma),
            "ks_stat": fit.ks_stat,
            "ks_pvalue": fit.ks_pvalue,
            "n": fit.n,
            "degenerate": fit.degenerate,
        },
    )
    edges = np.linspace(degrees.min(), degrees.max(), args.bins + 1)
    if edges[0] == edges[-1]:
        edges = np.array([edges[0] - 0.5, edges[0] + 0.5])
    counts, edges = np.histogram(degrees, bins=edges)
    widths = np.diff(edges)
    centers = (edges[:-1] + edges[1:]) / 2
    empirical = counts / (len(degrees) * widths)
    fitted = (
        lognormal_pdf(centers, fit.mu, fit.sigma)
        if fit.sigma > 0
        else np.zeros_like(centers)
    )
    pd.DataFrame(
        {
            "bin_left": edges[:-1],
            "bin_right": edges[1:],
            "empirical_density": empirical,
            "fitted_density": fitted,
        }
    ).to_csv(out / "fit_curve.csv", index=False)
    print(
        f"lognormal fit: mu={fit.mu:.4f} sigma={fit.sigma:.4f} "
        f"(n={fit.n}, KS p={fit.ks_pvalue:.4f})"
    )


def cmd_sample(args) -> None:
    g = load_edge_list(args.edgelist, attr_path=args.attributes)
    if args.kind == "snowball":
        if args.radius is None:
            raise ConfigError("snowball sampling needs --radius")
        rng = np.random.default_rng(np.random.SeedSequence(args.seed))
        sub = snowball(g, args.radius, min_size=args.min_size, rng=rng)
    else:
        if args.zip is None:
            raise ConfigError("zip sampling needs --zip")
        sub = attribute_subsample(g, args.zip, min_size=args.min_size)
        if sub is None:
            raise DataError(
                f"zip {args.zip!r} has fewer than {args.min_size} nodes"
            )
    induced = induce(g, sub)
    out = _out_dir(args, "sample")
    _write_config(out, args)
    with open(out / "nodes.txt", "w") as fh:
        for nid in sub.node_ids:
            fh.write(f"{nid}\n")
    write_edge_list(induced, out / "edges.txt")
    _write_json(
        out / "summary.json",
        {
            "kind": sub.kind,
            "n_nodes": len(sub.node_ids),
            "n_edges": induced.n_edges,
            "seed_node": sub.seed_node,
            "radius": sub.radius,
            "zip": sub.zip_value,
        },
    )
    print(f"{sub.kind} sample: {len(sub.node_ids)} nodes, {induced.n_edges} edges")


def cmd_sampling_regression(args) -> None:
    t0 = time.time()
    out = _out_dir(args, "sampling-regression")
    _write_config(out, args)
    if args.synth_study:
        cfg = SynthConfig.study(n_days=args.days)
        synth = generate_synthetic_cdr(cfg, seed=args.seed)
        study_cfg = StudyConfig(
            n_perm=args.n_perm,
            bin_width=args.bin_width,
            seed=args.seed,
            classifier=ClassifierConfig(
                kind="rf", n_trees=args.trees, n_threads=args.threads
            ),
        )
        result = run_subsampling_study(synth, study_cfg)
        result.table.to_csv(out / "study_table.csv", index=False)
        fit, pvalue = result.lad, result.pvalue
        n_rows = len(result.table)
    else:
        if not args.input:
            raise ConfigError("need --input CSV or --synth-study")
        frame = pd.read_csv(args.input)
        for col in ("mr", "avg_network_size", "sample_type"):
            if col not in frame.columns:
                raise DataError(f"{args.input}: missing column {col!r}")
        kinds = frame["sample_type"].astype(str).str.lower()
        known = kinds.isin(("snowball", "zip", "0", "1"))
        if not known.all():
            bad = sorted(set(kinds[~known]))
            raise DataError(f"{args.input}: unknown sample_type values {bad}")
        z = kinds.isin(("zip", "1")).to_numpy().astype(np.float64)
        pvalue, fit = permutation_test_beta2(
            frame["mr"].to_numpy(),
            frame["avg_network_size"].to_numpy(),
            z,
            n_perm=args.n_perm,
            seed=args.seed,
            width=args.bin_width,
            n_threads=args.threads,
        )
        n_rows = len(frame)
    _write_json(
        out / "regression.json",
        {
            "beta0": fit.beta0,
            "beta1": fit.beta1,
            "beta2": fit.beta2,
            "l1_objective": fit.objective,
            "beta2_degenerate": fit.degenerate,
            "permutation_pvalue": pvalue,
            "n_perm": args.n_perm,
            "bin_width": args.bin_width,
            "n_rows": n_rows,
            "elapsed_seconds": time.time() - t0,
        },
    )
    print(
        f"beta1={fit.beta1:.6f} beta2={fit.beta2:.6f} "
        f"permutation p={pvalue:.4f} ({n_rows} rows)"
    )


def cmd_synth_cdr(args) -> None:
    cfg = _synth_config(args.profile, args.days, args.label_mode)
    synth = generate_synthetic_cdr(cfg, seed=args.seed)
    out = _out_dir(args, "synth-cdr")
    _write_config(out, args)
    write_node_attributes(synth.population.attributes, out / "attributes.csv")
    write_edge_list(synth.population, out / "base_edges.txt")
    day_dir = out / "days"
    day_dir.mkdir(exist_ok=True)
    for g, date in zip(synth.days.graphs, synth.days.ids):
        write_edge_list(g, day_dir / f"{date}.edges")
    pd.DataFrame(
        {"graph_id": list(synth.days.ids), "label": synth.days.labels}
    ).to_csv(out / "labels.csv", index=False)
    _write_json(
        out / "manifest.json",
        {
            "profile": args.profile,
            "seed": args.seed,
            "n_days": cfg.n_days,
            "n_people": synth.population.n_stored,
            "n_base_edges": synth.population.n_edges,
            "label_mode": cfg.label_mode,
            "config": asdict(cfg),
        },
    )
    print(
        f"generated {cfg.n_days} days over {synth.population.n_stored} people "
        f"into {out}"
    )


# -- parser -------------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=0, help="root RNG seed")
    sub.add_argument(
        "--threads", type=int, default=None, help="worker threads (default: auto)"
    )
    sub.add_argument("--out", default=None, help="output directory")


def _add_input_options(sub: argparse.ArgumentParser, bipartite: bool = True) -> None:
    sub.add_argument("--tu", metavar="NAME", help="benchmark collection name")
    sub.add_argument("--data", default=None, help="dataset root directory")
    sub.add_argument("--graphs", help="directory of edge-list files (one graph each)")
    sub.add_argument("--attributes", help="node attribute CSV (id,sex,age,zip)")
    sub.add_argument("--labels", help="graph label CSV (graph_id,label)")
    if bipartite:
        sub.add_argument("--bipartite", help="directory of bipartite weight CSVs")
        sub.add_argument(
            "--q",
            type=float,
            default=DEFAULT_THRESHOLD_PERCENTILE,
            help="edge-weight threshold percentile",
        )
    sub.add_argument(
        "--synth", action="store_true", help="use generated daily networks"
    )
    sub.add_argument(
        "--profile",
        choices=SYNTH_PROFILES,
        default="distinct",
        help="synthetic regime profile",
    )
    sub.add_argument("--days", type=int, default=70, help="synthetic day count")
    sub.add_argument(
        "--label-mode",
        choices=("weekend", "dayofweek"),
        default="weekend",
        help="synthetic label scheme",
    )
    sub.add_argument(
        "--features",
        choices=FEATURE_SETS,
        default=None,
        help="feature set (default: benchmark6 for --tu, cdr otherwise)",
    )


def _add_classifier_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--classifier", choices=("rf", "knn", "kmeans"), default="rf"
    )
    sub.add_argument("--trees", type=int, default=DEFAULT_TREES, help="forest size")
    sub.add_argument(
        "--mtry", type=int, default=None, help="features per split (default sqrt)"
    )
    sub.add_argument("--k", type=int, default=5, help="neighbors for knn")
    sub.add_argument(
        "--clusters", type=int, default=None, help="kmeans clusters (default: classes)"
    )
    sub.add_argument("--restarts", type=int, default=10, help="kmeans restarts")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netclass",
        description="Network-collection classification from hand-selected features.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("fetch", help="download benchmark datasets")
    _add_common(p)
    p.add_argument("--dataset", nargs="+", required=True, metavar="NAME")
    p.add_argument("--data", default=None, help="dataset root directory")
    p.add_argument("--url", default=None, help="override download URL")
    p.set_defaults(func=cmd_fetch)

    p = subs.add_parser("extract", help="compute a feature matrix")
    _add_common(p)
    _add_input_options(p)
    p.set_defaults(func=cmd_extract)

    p = subs.add_parser("eval", help="train and evaluate a classifier")
    _add_common(p)
    _add_input_options(p)
    _add_classifier_options(p)
    p.add_argument(
        "--protocol", choices=("cv", "parity"), default="cv",
        help="cv folds or odd/even positional split",
    )
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--exclude", help="file of ids to drop (holidays etc.)")
    p.set_defaults(func=cmd_eval)

    p = subs.add_parser("importance", help="random-forest feature importances")
    _add_common(p)
    _add_input_options(p)
    p.add_argument("--trees", type=int, default=DEFAULT_TREES)
    p.add_argument("--mtry", type=int, default=None)
    p.set_defaults(func=cmd_importance)

    p = subs.add_parser("fit-dist", help="fit a degree distribution")
    _add_common(p)
    p.add_argument("--model", default="lognormal")
    p.add_argument("--degrees", help="file with one degree per line")
    p.add_argument("--edgelist", help="edge list to take degrees from")
    p.add_argument("--bins", type=int, default=50, help="histogram bins for the curve")
    p.set_defaults(func=cmd_fit_dist)

    p = subs.add_parser("sample", help="draw a snowball or zip subsample")
    _add_common(p)
    p.add_argument("--edgelist", required=True)
    p.add_argument("--attributes", help="node attribute CSV")
    p.add_argument("--kind", choices=("snowball", "zip"), required=True)
    p.add_argument("--radius", type=int, default=None)
    p.add_argument("--zip", default=None)
    p.add_argument("--min-size", type=int, default=50)
    p.set_defaults(func=cmd_sample)

    p = subs.add_parser(
        "sampling-regression",
        help="misclassification-vs-size LAD fit with permutation test",
    )
    _add_common(p)
    p.add_argument("--input", help="CSV with mr, avg_network_size, sample_type")
    p.add_argument(
        "--synth-study",
        action="store_true",
        help="run the full subsampling study on generated data",
    )
    p.add_argument("--days", type=int, default=70)
    p.add_argument("--trees", type=int, default=500)
    p.add_argument("--n-perm", type=int, default=1000)
    p.add_argument("--bin-width", type=float, default=20.0)
    p.set_defaults(func=cmd_sampling_regression)

    p = subs.add_parser("synth-cdr", help="generate synthetic daily networks")
    _add_common(p)
    p.add_argument("--profile", choices=SYNTH_PROFILES, default="distinct")
    p.add_argument("--days", type=int, default=70)
    p.add_argument(
        "--label-mode", choices=("weekend", "dayofweek"), default="weekend"
    )
    p.set_defaults(func=cmd_synth_cdr)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.threads is not None and args.threads < 1:
        print("config error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        args.func(args)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3


def run() -> None:
    raise SystemExit(main())
