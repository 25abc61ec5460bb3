"""Synthetic daily social-network generator with weekday/weekend regimes.

Real call-record data cannot be shipped, so experiments run on a labeled
stand-in with the same surface: a static population of people with sex,
age, and zip attributes living on a ring of zip codes; a base friendship
graph biased toward same-zip and age-proximate pairs, with cross-zip
edges reaching only a few ring steps (so snowball balls stay local); and
one network per calendar day, drawn by activating a weighted sample of
base edges. Weekday and weekend regimes can differ in activity level,
same-zip mixing, and age-gap tolerance, which moves exactly the
features (counts, FracSameZip, AvgAgeDif) a day-type classifier should
key on. Identical regimes make the labels carry no signal.

Everything is driven by one seed: same config + seed, same bytes out.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError
from .graph import Graph, GraphCollection, NodeAttr

WEEKDAY_LABEL = 1
WEEKEND_LABEL = 2


@dataclass
class RegimeParams:
    """Day-type behavior knobs.

    edge_fraction: share of base edges active on such a day;
    same_zip_boost: multiplicative sampling weight for same-zip edges;
    age_scale: age-gap tolerance of active edges (larger = bigger
    average age difference than the base graph's).
    """

    edge_fraction: float
    same_zip_boost: float
    age_scale: float

    def __post_init__(self):
        if not 0 < self.edge_fraction <= 1:
            raise ConfigError("edge_fraction must be in (0, 1]")
        if self.same_zip_boost <= 0 or self.age_scale <= 0:
            raise ConfigError("same_zip_boost and age_scale must be positive")


@dataclass
class SynthConfig:
    n_zips: int = 30
    zip_size_min: int = 40
    zip_size_max: int = 260
    avg_base_degree: float = 8.0
    base_same_zip: float = 0.75   # probability a base edge stays inside its zip
    ring_hop_p: float = 0.7       # geometric decay of cross-zip ring distance
    age_scale_base: float = 10.0  # age-gap tolerance of base friendships
    unknown_rate: float = 0.02    # per-attribute chance of a missing value
    n_days: int = 70
    start_date: str = "2014-01-06"  # a Monday
    label_mode: str = "weekend"     # "weekend" (1/2) or "dayofweek" (1..7)
    weekday: RegimeParams = field(
        default_factory=lambda: RegimeParams(
            edge_fraction=0.42, same_zip_boost=1.0, age_scale=10.0
        )
    )
    weekend: RegimeParams = field(
        default_factory=lambda: RegimeParams(
            edge_fraction=0.36, same_zip_boost=2.5, age_scale=14.0
        )
    )

    def __post_init__(self):
        if self.n_zips < 3:
            raise ConfigError("need at least 3 zips")
        if not 1 <= self.zip_size_min <= self.zip_size_max:
            raise ConfigError("zip sizes must satisfy 1 <= min <= max")
        if self.avg_base_degree <= 0:
            raise ConfigError("avg_base_degree must be positive")
        if not 0 <= self.base_same_zip <= 1:
            raise ConfigError("base_same_zip must be in [0, 1]")
        if not 0 < self.ring_hop_p < 1:
            raise ConfigError("ring_hop_p must be in (0, 1)")
        if not 0 <= self.unknown_rate < 1:
            raise ConfigError("unknown_rate must be in [0, 1)")
        if self.n_days < 1:
            raise ConfigError("n_days must be >= 1")
        if self.label_mode not in ("weekend", "dayofweek"):
            raise ConfigError("label_mode must be 'weekend' or 'dayofweek'")
        try:
            dt.date.fromisoformat(self.start_date)
        except ValueError as exc:
            raise ConfigError(f"bad start_date: {exc}") from None

    @classmethod
    def identical_regimes(cls, **kw) -> "SynthConfig":
        """Weekend behaves exactly like a weekday: labels carry no signal."""
        cfg = cls(**kw)
        return replace(cfg, weekend=replace(cfg.weekday))

    @classmethod
    def study(cls, **kw) -> "SynthConfig":
        """Subsampling-study profile: regimes differ in mixing, not size.

        Day-type signal lives almost entirely in same-zip mixing and age
        tolerance, so single-zip subsamples (where FracSameZip is
        constant 1) genuinely lose classification power relative to
        snowball samples of the same size. The sparser base graph keeps
        radius 3-4 snowball balls inside the zip size range, which the
        binned permutation test needs to mix sample types.
        """
        cfg = cls(**kw)
        return replace(
            cfg,
            avg_base_degree=4.0,
            weekday=RegimeParams(
                edge_fraction=0.40, same_zip_boost=1.0, age_scale=10.0
            ),
            weekend=RegimeParams(
                edge_fraction=0.40, same_zip_boost=2.5, age_scale=14.0
            ),
        )


@dataclass
class SyntheticCdr:
    """Generated population, base friendships, and labeled daily networks."""

    population: Graph              # base graph with all attributes
    days: GraphCollection          # one graph per date, labels by day type
    dates: tuple[str, ...]
    config: SynthConfig
    seed: int


def _build_population(cfg: SynthConfig, rng: np.random.Generator):
    sizes = rng.integers(cfg.zip_size_min, cfg.zip_size_max + 1, size=cfg.n_zips)
    n = int(sizes.sum())
    zip_of = np.repeat(np.arange(cfg.n_zips), sizes)
    ages = np.clip(np.round(rng.normal(38.0, 13.0, size=n)), 18, 90).astype(np.int64)
    sexes = np.where(rng.random(n) < 0.5, "female", "male")
    ids = tuple(f"p{i:06d}" for i in range(n))
    unknown = rng.random((n, 3)) < cfg.unknown_rate
    zip_names = [f"z{z:03d}" for z in range(cfg.n_zips)]
    attrs = {}
    for i in range(n):
        attrs[ids[i]] = NodeAttr(
            sex="unknown" if unknown[i, 0] else str(sexes[i]),
            age=None if unknown[i, 1] else int(ages[i]),
            zip=None if unknown[i, 2] else zip_names[zip_of[i]],
        )
    return ids, zip_of, ages, attrs


def _build_base_edges(cfg, rng, ids, zip_of, ages):
    """Distinct friend pairs plus per-edge same-zip flags and age gaps."""
    n = len(ids)
    zip_members = [np.flatnonzero(zip_of == z) for z in range(cfg.n_zips)]
    target = int(round(cfg.avg_base_degree * n / 2.0))
    seen = set()
    us, vs = [], []
    attempts = 0
    cap = 40 * target
    while len(us) < target and attempts < cap:
        attempts += 1
        u = int(rng.integers(n))
        if rng.random() < cfg.base_same_zip:
            zv = zip_of[u]
        else:
            hop = min(int(rng.geometric(cfg.ring_hop_p)), cfg.n_zips // 2)
            direction = 1 if rng.random() < 0.5 else -1
            zv = (zip_of[u] + direction * hop) % cfg.n_zips
        members = zip_members[zv]
        w = np.exp(-np.abs(ages[members] - ages[u]) / cfg.age_scale_base)
        w[members == u] = 0.0
        total = w.sum()
        if total <= 0:
            continue
        v = int(members[rng.choice(len(members), p=w / total)])
        a, b = (u, v) if u < v else (v, u)
        if a == b or (a, b) in seen:
            continue
        seen.add((a, b))
        us.append(a)
        vs.append(b)
    if len(us) < target:
        raise ConfigError(
            "could not place the requested number of base edges; "
            "lower avg_base_degree or raise zip sizes"
        )
    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    same_zip = zip_of[us] == zip_of[vs]
    age_dif = np.abs(ages[us] - ages[vs]).astype(np.float64)
    return us, vs, same_zip, age_dif


def _weighted_sample_without_replacement(weights, m, rng):
    # Gumbel top-k trick: exact weighted sampling, vectorized
    keys = np.log(weights) + rng.gumbel(size=len(weights))
    idx = np.argpartition(-keys, m - 1)[:m]
    return np.sort(idx)


def is_weekend(date: dt.date) -> bool:
    return date.weekday() >= 5


def generate_synthetic_cdr(cfg: SynthConfig, seed: int = 0) -> SyntheticCdr:
    """Build the population, base graph, and one labeled network per day."""
    root = np.random.SeedSequence(seed)
    pop_ss, edge_ss, days_ss = root.spawn(3)
    ids, zip_of, ages, attrs = _build_population(
        cfg, np.random.default_rng(pop_ss)
    )
    us, vs, same_zip, age_dif = _build_base_edges(
        cfg, np.random.default_rng(edge_ss), ids, zip_of, ages
    )
    id_arr = np.asarray(ids, dtype=object)
    population = Graph.from_edge_pairs(
        list(zip(id_arr[us], id_arr[vs])), extra_nodes=ids, attributes=attrs
    )

    start = dt.date.fromisoformat(cfg.start_date)
    dates = [start + dt.timedelta(days=d) for d in range(cfg.n_days)]
    day_seeds = days_ss.spawn(cfg.n_days)
    n_base = len(us)
    graphs, labels, date_ids = [], [], []
    for date, day_ss in zip(dates, day_seeds):
        regime = cfg.weekend if is_weekend(date) else cfg.weekday
        rng = np.random.default_rng(day_ss)
        w = np.where(same_zip, regime.same_zip_boost, 1.0) * np.exp(
            age_dif * (1.0 / cfg.age_scale_base - 1.0 / regime.age_scale)
        )
        m = max(1, int(round(regime.edge_fraction * n_base)))
        chosen = _weighted_sample_without_replacement(w, m, rng)
        pairs = list(zip(id_arr[us[chosen]], id_arr[vs[chosen]]))
        graphs.append(
            Graph.from_edge_pairs(pairs, extra_nodes=ids, attributes=attrs)
        )
        date_ids.append(date.isoformat())
        if cfg.label_mode == "weekend":
            labels.append(WEEKEND_LABEL if is_weekend(date) else WEEKDAY_LABEL)
        else:
            labels.append(date.weekday() + 1)
    days = GraphCollection(
        graphs=graphs, ids=date_ids, labels=np.asarray(labels, dtype=np.int64)
    )
    return SyntheticCdr(
        population=population,
        days=days,
        dates=tuple(date_ids),
        config=cfg,
        seed=seed,
    )
