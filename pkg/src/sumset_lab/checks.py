"""Deterministic statistics for the hypotheses on the ground and delta sequences.

Limits cannot be decided on finite data, so trend-type hypotheses get a
``heuristic-pass``/``heuristic-fail`` verdict from geometric checkpoints,
while pointwise conditions (D3, E2) get an exact ``pass``/``fail``.

Probability bounds are carried in natural-log space in float64; the only
exponentiated quantities are ratios that are O(1) by construction.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import DomainError
from .generators import (DeltaSequence, GroundSequence, _gap_arrays, d3_upper,
                         support_size)

REPORT_FORMAT = "sumset-lab/hypothesis-report/1"
DEFAULT_KAPPA = math.log(2) / 4


def f_of_x(ground: GroundSequence, x: int) -> Fraction:
    """f(x) = x / S(x), exactly."""
    Sx = ground.S(x)
    if Sx == 0:
        raise DomainError(f"S({x}) = 0")
    return Fraction(x, Sx)


def _index_through(ground: GroundSequence, x: int, extra: int) -> int:
    K = ground.S(x)
    if K + extra > len(ground):
        raise DomainError(f"need {extra} ground terms past {x}; materialize further")
    return K


def gap_triple_count(ground: GroundSequence, x: int, h: int) -> int:
    """#{k : s_k <= x and s_{k+2} - s_k <= h}."""
    K = _index_through(ground, x, 2)
    t = ground.terms
    return int(np.count_nonzero(t[2:K + 2] - t[:K] <= h))


def twin_count(ground: GroundSequence, x: int, m: int, method: str = "scan") -> int:
    """#{s <= x : s in S and s + m in S}."""
    if m < 1:
        raise DomainError("twin_count needs m >= 1")
    if x + m > ground.limit:
        raise DomainError(f"twin_count needs the ground through {x + m}")
    t = ground.terms
    K = ground.S(x)
    if method == "scan":
        pos = np.searchsorted(t, t[:K] + m)
        pos = np.minimum(pos, len(t) - 1)
        return int(np.count_nonzero(t[pos] == t[:K] + m))
    if method == "mask":
        mask = ground.as_set().mask
        low = (1 << (x + 1)) - 1
        return (mask & (mask >> m) & low).bit_count()
    raise ValueError(f"unknown twin_count method {method!r}")


@dataclass
class DeltaDiagnostics:
    d1_defect: int
    d2_sum: float
    d3_ok: bool


def delta_diagnostics(ground: GroundSequence, delta: DeltaSequence, x: int, ell: int,
                      exact: bool = False) -> DeltaDiagnostics:
    """D1 defect count, the D2 window-product sum and the D3 check.

    d1_defect = #{n <= x : delta_n < 2} (indices, not ground values);
    d2_sum = sum over s_k <= x of prod_{i<ell} 1/delta_{k+i};
    d3_ok covers every n >= 2 with delta_n and s_{n+1} available.
    With ``exact`` the D2 sum is accumulated as a Fraction.
    """
    if ell < 1:
        raise DomainError("ell must be >= 1")
    if x > len(delta):
        raise DomainError(f"d1_defect needs delta_1..delta_{x}")
    K = ground.S(x)
    if K + ell - 1 > len(delta):
        raise DomainError(f"d2_sum needs delta up to index {K + ell - 1}")
    v = delta.values
    d1 = int(np.count_nonzero(v[:x] < 2))
    if exact:
        etas = [1 / Fraction(float(d)) for d in v[:K + ell - 1]]
        total = Fraction(0)
        for k in range(K):
            p = Fraction(1)
            for i in range(ell):
                p *= etas[k + i]
            total += p
        d2 = total
    else:
        logs = -np.log(v[:K + ell - 1])
        window = np.convolve(logs, np.ones(ell))[ell - 1:ell - 1 + K] if K else np.zeros(0)
        d2 = math.fsum(np.exp(window).tolist())
    return DeltaDiagnostics(d1, d2, d3_holds(ground, delta))


def d3_holds(ground: GroundSequence, delta: DeltaSequence) -> bool:
    count = min(len(delta), len(ground) - 1)
    if count < 2:
        return True
    upper = d3_upper(ground, count)[1:]
    v = delta.values[1:count]
    return bool(np.all((v >= 1) & (v <= upper)))


def e2_holds_uniform(ground: GroundSequence, delta: DeltaSequence) -> bool:
    """Uniform epsilon has atom mass 1/m_n; E2 is m_n >= delta_n for each n."""
    count = min(len(delta), len(ground) - 1)
    g_minus, g_plus = _gap_arrays(ground, count)
    return bool(np.all(support_size(g_minus, g_plus) >= delta.values[:count]))


@dataclass
class WirsingBounds:
    threshold: int
    count_bound_log: float
    pointwise_log: float
    dec1_log: float


def wirsing_bounds(ground: GroundSequence, delta: DeltaSequence, x: int) -> WirsingBounds:
    """Log-space pieces of the counting argument against small decompositions.

    threshold r = floor((log 2 / 2) x / (f log f)); the number of candidate
    sets C ∩ [0, x] is at most r (2 e x / r)^r; each has probability at most
    prod_{n : s_{n+1} < x} eta_n.
    """
    f = float(f_of_x(ground, x))
    if f <= math.e:
        raise DomainError(f"f({x}) = {f:.4f} <= e; log f(x) must exceed 1")
    r = math.floor(math.log(2) / 2 * x / (f * math.log(f)))
    if r < 1:
        raise DomainError(f"threshold rounds to {r} at x = {x}")
    count_log = math.log(r) + r * math.log(2 * math.e * x / r)
    m = int(np.count_nonzero(ground.terms[1:] < x))
    if m > len(delta):
        raise DomainError(f"pointwise product needs delta_1..delta_{m}")
    pointwise = -math.fsum(np.log(delta.values[:m]).tolist())
    return WirsingBounds(r, count_log, pointwise, count_log + pointwise)


def adjacency_prob_bound(delta: DeltaSequence, k: int, h: int) -> Fraction:
    """h^2 eta_k eta_{k+1}, an upper bound on P(c_k + h = c_{k+1})."""
    if h < 1:
        raise DomainError("h must be >= 1")
    return Fraction(h * h) / (Fraction(delta.delta(k)) * Fraction(delta.delta(k + 1)))


def close_pair_bound(delta: DeltaSequence, k: int, H: int) -> Fraction:
    """H^3 eta_k eta_{k+1}, an upper bound on P(c_{k+1} - c_k <= H)."""
    if H < 1:
        raise DomainError("H must be >= 1")
    return Fraction(H ** 3) / (Fraction(delta.delta(k)) * Fraction(delta.delta(k + 1)))


def dec3_threshold(ground: GroundSequence, x: int, kappa: float = DEFAULT_KAPPA) -> float:
    """kappa x / (f(x) log f(x)), the size a large summand must reach."""
    f = float(f_of_x(ground, x))
    return kappa * x / (f * math.log(f))


# reports ---------------------------------------------------------------------

def _strictly_decreasing(vals: list[float]) -> bool:
    return all(b < a for a, b in zip(vals, vals[1:]))


def _strictly_increasing(vals: list[float]) -> bool:
    return all(b > a for a, b in zip(vals, vals[1:]))


def _heuristic(ok: bool) -> str:
    return "heuristic-pass" if ok else "heuristic-fail"


@dataclass
class HypothesisReport:
    ground: str
    checkpoints: list[dict]
    verdicts: dict
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["format"] = REPORT_FORMAT
        return d


def hypothesis_report(ground: GroundSequence, delta: DeltaSequence, checkpoints: Iterable[int],
                      hs: Iterable[int] = (2, 6, 12), ell: int = 4,
                      kappa: float = DEFAULT_KAPPA) -> HypothesisReport:
    xs = sorted(set(int(x) for x in checkpoints))
    hs = list(hs)
    rows = []
    for x in xs:
        fx = f_of_x(ground, x)
        f = float(fx)
        Sx = ground.S(x)
        logf = math.log(f) if f > 1 else float("nan")
        row = {"x": x, "S": Sx, "f": f, "f_exact": f"{fx.numerator}/{fx.denominator}"}
        counts = {str(h): gap_triple_count(ground, x, h) for h in hs}
        row["gap_counts"] = counts
        if f > 1:
            row["s2_ratio"] = {h: c * logf / Sx for h, c in counts.items()}
        diag = delta_diagnostics(ground, delta, x, ell) if x <= len(delta) else None
        if diag is not None:
            row["d1_defect"] = diag.d1_defect
            row["d1_fraction"] = diag.d1_defect / x
            row["d2_sum"] = diag.d2_sum
            if f > 1:
                row["d2_ratio"] = diag.d2_sum * logf / Sx
        if f > math.e:
            wb = wirsing_bounds(ground, delta, x)
            row["thresholds"] = {
                "dec1_r": wb.threshold,
                "count_bound_log": wb.count_bound_log,
                "pointwise_log": wb.pointwise_log,
                "dec1_log": wb.dec1_log,
                "dec3_kappa": kappa,
                "dec3_threshold": dec3_threshold(ground, x, kappa),
            }
        rows.append(row)

    verdicts = {"S1": _heuristic(_strictly_increasing([r["f"] for r in rows]))}
    s2 = {}
    for h in map(str, hs):
        vals = [r["s2_ratio"][h] for r in rows if "s2_ratio" in r]
        # an identically zero ratio (primes, h = 2) already sits at its limit
        s2[h] = _heuristic(len(vals) >= 2 and (_strictly_decreasing(vals)
                                               or not any(vals)))
    verdicts["S2"] = s2
    d1 = [r["d1_fraction"] for r in rows if "d1_fraction" in r]
    # the defect fraction has to head to 0: already there, or strictly falling
    verdicts["D1"] = _heuristic(len(d1) >= 2 and (d1[-1] == 0 or _strictly_decreasing(d1)))
    d2 = [r["d2_ratio"] for r in rows if "d2_ratio" in r]
    verdicts["D2"] = _heuristic(len(d2) >= 2 and _strictly_decreasing(d2))
    verdicts["D3"] = "pass" if d3_holds(ground, delta) else "fail"
    verdicts["E2_uniform"] = "pass" if e2_holds_uniform(ground, delta) else "fail"
    dec1 = [r["thresholds"]["dec1_log"] for r in rows if "thresholds" in r]
    verdicts["Dec1_shadow"] = _heuristic(len(dec1) >= 2 and all(v < 0 for v in dec1)
                                         and _strictly_decreasing(dec1))
    params = {"ell": ell, "hs": hs, "kappa": kappa,
              "iota": delta.iota, "scale": delta.scale}
    return HypothesisReport(ground.name, rows, verdicts, params)
