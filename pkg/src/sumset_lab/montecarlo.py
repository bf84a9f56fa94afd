"""Seeded Monte Carlo experiments on the perturbation model.

Trial t draws its perturbations from ``SeedStream(master).child(t)``, with
epsilon_n taken from word n of that stream, exactly as
:func:`sumset_lab.generators.sample_epsilon` would. Trials are processed in
fixed-size chunks that are concatenated in trial order, so the thread count
never changes a report.
"""
from __future__ import annotations

import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import checks
from .decompose import min_adjacent_gap_profile
from .errors import DomainError
from .generators import (DeltaSequence, EpsilonDistribution, GroundSequence, PerturbationModel,
                         _gap_arrays, default_delta, make_ground, perturbed_terms,
                         perturbed_window_top, tight_delta)
from .intset import FiniteIntegerSet
from .seeding import SeedStream, words_for_keys
from . import kernels

SPEC_FORMAT = "sumset-lab/mc-spec/1"
REPORT_FORMAT = "sumset-lab/mc-report/1"
CHUNK = 8192
STATISTICS = ("adjacency", "close_pair", "pattern_count", "gap_profile")
PATTERN_LIBRARY = ((0, 2), (0, 2, 6), (0, 6, 12, 18))


@functools.lru_cache(maxsize=8)
def _ground(kind: str, limit: int) -> GroundSequence:
    return make_ground(kind, limit)


@dataclass(frozen=True)
class ModelConfig:
    """Recipe for a :class:`PerturbationModel`.

    ``delta`` is ``"default"`` (uses ``iota`` and ``scale``), ``"tight"``
    (the largest sequence allowed by D3 and the uniform law) or
    ``"constant"`` (uses ``delta_value``).
    """

    ground: str = "primes"
    limit: int = 200_000
    delta: str = "tight"
    iota: float = 0.5
    scale: float = 1.0
    delta_value: float = 2.0
    epsilon: str = "uniform"

    def __post_init__(self):
        if self.delta not in ("default", "tight", "constant"):
            raise DomainError(f"unknown delta recipe {self.delta!r}")
        EpsilonDistribution(self.epsilon)

    def build(self) -> PerturbationModel:
        g = _ground(self.ground, int(self.limit))
        if self.delta == "default":
            d = default_delta(g, self.iota, self.scale)
        elif self.delta == "tight":
            d = tight_delta(g)
        else:
            d = DeltaSequence.constant(self.delta_value, len(g) - 1)
        return PerturbationModel(g, d, EpsilonDistribution(self.epsilon))

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise DomainError(f"unknown model fields {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ExperimentSpec:
    """One statistic measured over ``trials`` seeded trials.

    ``statistic`` is a dict with a ``kind`` plus its parameters:
    ``adjacency`` (k, h), ``close_pair`` (k, H), ``pattern_count``
    (pattern, checkpoints) or ``gap_profile`` (K).
    """

    model: ModelConfig
    statistic: dict
    trials: int
    master_seed: int

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError("trials must be at least 1")
        kind = self.statistic.get("kind")
        if kind not in STATISTICS:
            raise DomainError(f"unknown statistic {kind!r}")
        need = {"adjacency": ("k", "h"), "close_pair": ("k", "H"),
                "pattern_count": ("pattern", "checkpoints"), "gap_profile": ("K",)}[kind]
        missing = [p for p in need if p not in self.statistic]
        if missing:
            raise DomainError(f"statistic {kind} needs {missing}")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        fmt = d.get("format", SPEC_FORMAT)
        if fmt != SPEC_FORMAT:
            raise DomainError(f"unsupported spec format {fmt!r}")
        try:
            return cls(ModelConfig.from_dict(d.get("model", {})), dict(d["statistic"]),
                       int(d["trials"]), int(d["master_seed"]))
        except KeyError as e:
            raise DomainError(f"spec is missing {e.args[0]!r}") from None
        except TypeError as e:
            raise DomainError(f"bad spec: {e}") from None

    def to_dict(self) -> dict:
        return {"format": SPEC_FORMAT, "model": self.model.to_dict(),
                "statistic": dict(self.statistic), "trials": self.trials,
                "master_seed": self.master_seed}


@dataclass
class ExperimentReport:
    spec: ExperimentSpec
    values: np.ndarray
    mean: float
    variance: float
    max: float
    bound: Optional[float] = None
    vacuous: bool = False
    passed: Optional[bool] = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        vals = self.values.tolist()
        return {"format": REPORT_FORMAT, "spec": self.spec.to_dict(),
                "trials": self.spec.trials, "values": vals, "mean": self.mean,
                "variance": self.variance, "max": self.max, "bound": self.bound,
                "vacuous": self.vacuous, "passed": self.passed, "extra": self.extra}


# trial plumbing --------------------------------------------------------------

def _chunks(trials: int):
    return [(s, min(s + CHUNK, trials)) for s in range(0, trials, CHUNK)]


def _map_chunks(fn, trials: int, threads: int):
    parts = _chunks(trials)
    if threads <= 1 or len(parts) == 1:
        return [fn(a, b) for a, b in parts]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(lambda ab: fn(*ab), parts))


def _epsilon_at(model: PerturbationModel, keys: np.ndarray, n: int) -> np.ndarray:
    g_minus, g_plus = _gap_arrays(model.ground, n)
    words = words_for_keys(keys, n)
    gm = np.full(keys.size, g_minus[n - 1])
    gp = np.full(keys.size, g_plus[n - 1])
    return model.epsilon.sample(words, gm, gp)


def _consecutive_gap(model: PerturbationModel, k: int, master: int, trials: int,
                     threads: int) -> np.ndarray:
    """c_{k+1} - c_k for every trial."""
    if k < 1 or k + 2 > len(model.ground):
        raise DomainError(f"index k = {k} is outside the materialized ground")
    root = SeedStream(master)
    s_k, s_k1 = int(model.ground.terms[k - 1]), int(model.ground.terms[k])

    def chunk(a, b):
        keys = root.child_keys(np.arange(a, b, dtype=np.int64))
        return (s_k1 + _epsilon_at(model, keys, k + 1)) - (s_k + _epsilon_at(model, keys, k))

    return np.concatenate(_map_chunks(chunk, trials, threads))


def _frequency_report(spec: ExperimentSpec, hits: np.ndarray, bound) -> ExperimentReport:
    values = hits.astype(np.int64)
    n = spec.trials
    count = int(values.sum())
    mean = count / n
    var = count * (n - count) / (n * (n - 1)) if n > 1 else 0.0
    b = float(bound)
    vacuous = b >= 1
    passed = None if vacuous else bool(mean <= b + 3 * math.sqrt(b / n))
    return ExperimentReport(spec, values, mean, var, float(values.max(initial=0)), b,
                            vacuous, passed, {"count": count, "bound_exact": str(bound)})


def estimate_adjacency_prob(spec: ExperimentSpec, threads: int = 1) -> ExperimentReport:
    """Frequency of c_k + h = c_{k+1}, against h^2 eta_k eta_{k+1}."""
    st = spec.statistic
    k, h = int(st["k"]), int(st["h"])
    model = spec.model.build()
    gaps = _consecutive_gap(model, k, spec.master_seed, spec.trials, threads)
    bound = checks.adjacency_prob_bound(model.delta, k, h) if h >= 1 else 0
    return _frequency_report(spec, gaps == h, bound)


def estimate_close_pair_prob(spec: ExperimentSpec, threads: int = 1) -> ExperimentReport:
    """Frequency of c_{k+1} - c_k <= H, against H^3 eta_k eta_{k+1}."""
    st = spec.statistic
    k, H = int(st["k"]), int(st["H"])
    model = spec.model.build()
    gaps = _consecutive_gap(model, k, spec.master_seed, spec.trials, threads)
    return _frequency_report(spec, gaps <= H, checks.close_pair_bound(model.delta, k, H))


# pattern counts --------------------------------------------------------------

def pattern_translate_count(C, pattern, x: int, method: str = "intersect") -> int:
    """#{n in [0, x] : n + pattern inside C}.

    A :class:`FiniteIntegerSet` is only trusted on its window, so every
    n + b must land there. Any other collection is taken as a complete
    finite set.

    >>> pattern_translate_count([2, 3, 5, 7, 11, 13], [0, 2], 13)
    3
    """
    P = np.unique(np.asarray(list(pattern), dtype=np.int64))
    if P.size == 0:
        raise DomainError("pattern must be nonempty")
    if x < 0:
        return 0
    if not isinstance(C, FiniteIntegerSet):
        el = np.asarray(list(C), dtype=np.int64)
        top = max(int(x + P.max()), int(el.max(initial=0)))
        C = FiniteIntegerSet(el, (min(0, int(P.min()), int(el.min(initial=0))), top))
    lo, hi = C.window_lo, C.window_hi
    if x + int(P.max()) > hi:
        raise DomainError(f"x + max pattern = {x + int(P.max())} passes the window end {hi}")
    if int(P.min()) < lo:
        raise DomainError(f"n + {int(P.min())} falls below the window start {lo}")
    if method == "intersect":
        r = (1 << (x + 1)) - 1
        for b in P.tolist():
            r &= C.mask >> (b - lo)
        return r.bit_count()
    if method == "scan":
        dense = C.dense().view(np.uint8)
        pmin = int(P.min())
        hits = kernels.translate_hits(dense, P - pmin, pmin - lo, pmin - lo + x + 1)
        return int(hits.size)
    raise ValueError(f"unknown method {method!r}")


def _pattern_trial(model: PerturbationModel, count: int, P: np.ndarray, xs: list[int],
                   seed: SeedStream):
    c = perturbed_terms(model, count, seed)
    C = FiniteIntegerSet(c, (0, perturbed_window_top(model, count)), assume_sorted=True)
    counts = [pattern_translate_count(C, P, x) for x in xs]
    # forced-run diagnostic: hits n <= max x whose elements are consecutive c_j
    xmax = xs[-1]
    r = (1 << (xmax + 1)) - 1
    for b in P.tolist():
        r &= C.mask >> b
    ns = np.nonzero(np.unpackbits(np.frombuffer(r.to_bytes((xmax + 8) // 8, "little"),
                                                dtype=np.uint8), bitorder="little"))[0]
    consecutive = 0
    if ns.size:
        j = np.searchsorted(c, ns[:, None] + P[None, :])
        consecutive = int(np.count_nonzero(np.all(np.diff(j, axis=1) == 1, axis=1)))
    return counts, int(ns.size), consecutive


def _pattern_experiment(spec: ExperimentSpec, threads: int) -> ExperimentReport:
    st = spec.statistic
    P = np.unique(np.asarray(st["pattern"], dtype=np.int64))
    if P.size == 0 or P.min() < 0:
        raise DomainError("pattern must be nonempty and nonnegative")
    xs = sorted(int(x) for x in st["checkpoints"])
    if not xs or xs[0] < 1:
        raise DomainError("checkpoints must be positive")
    model = spec.model.build()
    g = model.ground
    need = xs[-1] + int(P.max())
    if need >= g.limit:
        raise DomainError(f"the ground must reach past {need}; raise model.limit")
    count = g.S(need) + 1
    if count + 1 > len(g):
        raise DomainError("the ground needs one more term; raise model.limit")
    root = SeedStream(spec.master_seed)

    def chunk(a, b):
        return [_pattern_trial(model, count, P, xs, root.child(t)) for t in range(a, b)]

    rows = [r for part in _map_chunks(chunk, spec.trials, threads) for r in part]
    per_x = np.array([r[0] for r in rows], dtype=np.int64)
    hits = sum(r[1] for r in rows)
    consecutive = sum(r[2] for r in rows)
    table = []
    for i, x in enumerate(xs):
        comp = checks.dec3_threshold(g, x, kappa=1.0)
        mean = float(per_x[:, i].mean())
        table.append({"x": x, "mean_count": mean, "comparison": comp, "ratio": mean / comp})
    ratios = [row["ratio"] for row in table]
    extra = {"checkpoints": table,
             "ratio_decreasing": all(b < a for a, b in zip(ratios, ratios[1:])),
             "hits": hits, "consecutive_hits": consecutive,
             "forced_run_fraction": consecutive / hits if hits else None}
    values = per_x[:, -1]
    var = float(values.var(ddof=1)) if values.size > 1 else 0.0
    return ExperimentReport(spec, values, float(values.mean()), var, float(values.max()),
                            extra=extra)


def _gap_profile_experiment(spec: ExperimentSpec, threads: int) -> ExperimentReport:
    K = int(spec.statistic["K"])
    model = spec.model.build()
    if K < 1 or K + 3 > len(model.ground):
        raise DomainError(f"K = {K} needs {K + 3} ground terms")
    root = SeedStream(spec.master_seed)
    marks = sorted({m for m in (10, 100, 1000, 10_000, 100_000, 1_000_000) if m < K} | {K})

    def chunk(a, b):
        out = []
        for t in range(a, b):
            c = perturbed_terms(model, K + 2, root.child(t))
            prof = np.maximum.accumulate(np.asarray(min_adjacent_gap_profile(c, K)))
            out.append([int(prof[m - 1]) for m in marks])
        return out

    rows = np.array([r for part in _map_chunks(chunk, spec.trials, threads) for r in part])
    values = rows[:, -1]
    running = [{"K": m, "mean_running_max": float(rows[:, i].mean())}
               for i, m in enumerate(marks)]
    var = float(values.var(ddof=1)) if values.size > 1 else 0.0
    return ExperimentReport(spec, values, float(values.mean()), var, float(values.max()),
                            extra={"running_max": running})


def run_experiment(spec: ExperimentSpec, threads: int = 1) -> ExperimentReport:
    kind = spec.statistic["kind"]
    if kind == "adjacency":
        return estimate_adjacency_prob(spec, threads)
    if kind == "close_pair":
        return estimate_close_pair_prob(spec, threads)
    if kind == "pattern_count":
        return _pattern_experiment(spec, threads)
    return _gap_profile_experiment(spec, threads)


# default suite ---------------------------------------------------------------

def sample_indices(model: PerturbationModel, count: int = 20, h_max: int = 3,
                   top: Optional[int] = None) -> list[int]:
    """``count`` indices, evenly spread by rank, where every bound up to h_max^3 is below 1."""
    n = len(model.delta) - 1 if top is None else top
    v = model.delta.values
    k = np.arange(1, n)
    ok = k[v[k - 1] * v[k] > h_max ** 3]
    if ok.size < count:
        raise DomainError(f"only {ok.size} indices keep the bounds non-vacuous")
    pick = np.linspace(0, ok.size - 1, count).round().astype(int)
    return ok[pick].tolist()


def default_suite(model: ModelConfig = ModelConfig(), trials: int = 100_000,
                  master_seed: int = 1, count: int = 20) -> list[ExperimentSpec]:
    """Adjacency (h = 1, 2, 3) and close-pair (H = 1, 2, 3) specs at sampled indices."""
    ks = sample_indices(model.build(), count)
    specs = []
    for k in ks:
        for h in (1, 2, 3):
            specs.append(ExperimentSpec(model, {"kind": "adjacency", "k": k, "h": h},
                                        trials, master_seed))
            specs.append(ExperimentSpec(model, {"kind": "close_pair", "k": k, "H": h},
                                        trials, master_seed))
    return specs
