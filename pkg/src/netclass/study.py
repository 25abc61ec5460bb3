"""The subsampling study: how sampling design distorts day-type accuracy.

Pipeline: draw snowball balls (radii 3 and 4 by default) and whole-zip
groups from a synthetic population; induce each day's network on every
subsample; extract daily-network features; train a forest on odd days
and measure weekday/weekend misclassification on even days; then fit

    1/(MR + 0.01) = beta0 + beta1 * size + beta2 * is_zip * size

by least absolute deviations and test beta2 with a permutation test that
shuffles the sample-type labels only within average-size bins. A
negative, significant beta2 means zip sampling costs accuracy beyond
what network size explains.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import ConfigError, DataError
from .evaluate import ClassifierConfig, evaluate_split, split_by_parity
from .features import num_nodes
from .forest import CI_TREES
from .graph import GraphCollection
from .pipeline import build_cdr_matrix
from .sampling import (
    DEFAULT_MIN_SIZE,
    attribute_subsample,
    induce,
    qualifying_zips,
    snowball,
)
from .stats import LadFit, permutation_test_beta2
from .synth import SyntheticCdr


@dataclass
class StudyConfig:
    radii: tuple[int, ...] = (3, 4)
    n_snowball_per_radius: int = 45
    min_size: int = DEFAULT_MIN_SIZE
    classifier: ClassifierConfig = field(
        default_factory=lambda: ClassifierConfig(kind="rf", n_trees=CI_TREES)
    )
    n_perm: int = 1000
    bin_width: float = 20.0
    n_bins: int = 50          # histogram bins for distribution features
    seed: int = 0

    def __post_init__(self):
        if not self.radii:
            raise ConfigError("need at least one snowball radius")
        if self.n_snowball_per_radius < 1:
            raise ConfigError("n_snowball_per_radius must be >= 1")


@dataclass
class StudyResult:
    table: pd.DataFrame       # per-subsample: id, kind, radius, size, mr
    lad: LadFit
    pvalue: float


def _subsample_row(synth: SyntheticCdr, sub, sample_id: str, cfg: StudyConfig):
    """Average daily size and even-day misclassification for one subsample."""
    daily = [induce(day, sub) for day in synth.days.graphs]
    sizes = [num_nodes(g) for g in daily]
    collection = GraphCollection(
        graphs=daily, ids=list(synth.days.ids), labels=synth.days.labels
    )
    features = build_cdr_matrix(collection, n_bins=cfg.n_bins, warn_missing=False)
    train_idx, test_idx = split_by_parity(features)
    result = evaluate_split(
        features, cfg.classifier, train_idx, test_idx, seed=cfg.seed
    )
    return {
        "sample_id": sample_id,
        "kind": sub.kind,
        "radius": sub.radius if sub.radius is not None else 0,
        "avg_network_size": float(np.mean(sizes)),
        "mr": result.misclassification_rate,
    }


def run_subsampling_study(synth: SyntheticCdr, cfg: StudyConfig) -> StudyResult:
    """Full experiment on generated data; see the module docstring."""
    rows = []
    base = synth.population
    for zip_value in qualifying_zips(base, cfg.min_size):
        sub = attribute_subsample(base, zip_value, cfg.min_size)
        if sub is None:
            continue
        rows.append(_subsample_row(synth, sub, f"zip-{zip_value}", cfg))

    ball_seeds = np.random.SeedSequence(cfg.seed).spawn(
        len(cfg.radii) * cfg.n_snowball_per_radius
    )
    i = 0
    for radius in cfg.radii:
        for rep in range(cfg.n_snowball_per_radius):
            rng = np.random.default_rng(ball_seeds[i])
            i += 1
            sub = snowball(base, radius, cfg.min_size, rng)
            rows.append(
                _subsample_row(synth, sub, f"snowball-r{radius}-{rep:03d}", cfg)
            )

    if len(rows) < 3:
        raise DataError("too few qualifying subsamples for the regression")
    table = pd.DataFrame(rows)
    mr = table["mr"].to_numpy()
    x = table["avg_network_size"].to_numpy()
    z = (table["kind"] == "zip").to_numpy().astype(np.float64)
    pvalue, lad = permutation_test_beta2(
        mr, x, z, n_perm=cfg.n_perm, seed=cfg.seed, width=cfg.bin_width
    )
    return StudyResult(table=table, lad=lad, pvalue=pvalue)
