"""Empirical CDFs of solver results and the dominance-based indicators built on them.

Every cross-solver operation requires equal sample counts H; only `reference_cdf_relative`
trims solvers to their best H = min H_s values.
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from . import config
from .defs.meta import ReferenceKind
from .errors import MetricInputError, MixedReferencesError, ReferenceViolationError
from .utils.hash import digest_values


@dataclass(frozen=True)
class SolutionSet:
    label: str
    values: tuple

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if not values:
            raise MetricInputError(f"solution set '{self.label}' is empty")
        if not np.all(np.isfinite(values)):
            raise MetricInputError(f"solution set '{self.label}' holds non-finite values")
        object.__setattr__(self, "values", values)

    @property
    def h(self) -> int:
        return len(self.values)


@dataclass(frozen=True, eq=False)
class EmpiricalCdf:
    sorted_values: np.ndarray
    label: str = ""

    @property
    def h(self) -> int:
        return len(self.sorted_values)

    @property
    def step(self) -> float:
        return 1.0 / self.h


@dataclass(frozen=True, eq=False)
class ReferenceCdf(EmpiricalCdf):
    kind: ReferenceKind = ReferenceKind.GLOBAL
    # labels of the solvers each entry was drawn from (relative references only)
    provenance: tuple = ()

    @property
    def digest(self) -> str:
        return digest_values(self.sorted_values)


@dataclass(frozen=True)
class SolverRecord:
    label: str
    area: float
    opisd: float
    perc: Optional[float] = None
    rank: int = 0
    reference_digest: Optional[str] = None


@dataclass(frozen=True)
class PerformanceReport:
    records: tuple
    h: Optional[int] = None
    reference: Optional[ReferenceCdf] = None
    eps: float = 0.0
    test_cdfs: tuple = field(default=(), repr=False)

    @property
    def ranking(self) -> list:
        return [record.label for record in self.records]

    @property
    def kind(self) -> Optional[ReferenceKind]:
        return None if self.reference is None else self.reference.kind

    def record(self, label: str) -> SolverRecord:
        for record in self.records:
            if record.label == label:
                return record
        raise KeyError(label)


def _values(data) -> np.ndarray:
    if isinstance(data, SolutionSet):
        return np.asarray(data.values)
    if isinstance(data, EmpiricalCdf):
        return data.sorted_values
    return np.asarray(data, dtype=float)


def _check_same_h(*cdfs):
    sizes = {cdf.h for cdf in cdfs}
    if len(sizes) != 1:
        raise MetricInputError(f"CDFs must share the same H, got {sorted(sizes)}")


def build_cdf(values, label: str = "") -> EmpiricalCdf:
    if isinstance(values, SolutionSet):
        label = label or values.label
    array = _values(values).astype(float)
    if array.size == 0:
        raise MetricInputError("cannot build a CDF from no values")
    if not np.all(np.isfinite(array)):
        raise MetricInputError("CDF values must be finite")
    return EmpiricalCdf(np.sort(array, kind="stable"), label)


def evaluate_cdf(cdf: EmpiricalCdf, y):
    """F(y): fraction of values <= y; vectorized over `y`."""
    return np.searchsorted(cdf.sorted_values, y, side="right") / cdf.h


def cdf_breakpoints(cdf: EmpiricalCdf) -> list:
    """(y(z), z/H) for z = 1..H, the corners of the step function."""
    return [(float(y), (z + 1) / cdf.h) for z, y in enumerate(cdf.sorted_values)]


def deterministic_dominance(a, b) -> bool:
    """Every value of `a` is strictly better than every value of `b`."""
    a, b = _values(a), _values(b)
    if a.size == 0 or b.size == 0:
        raise MetricInputError("deterministic dominance needs non-empty sets")
    return bool(a.max() < b.min())


def first_order_dominates(f_a: EmpiricalCdf, f_b: EmpiricalCdf) -> bool:
    """F_A >= F_B everywhere and somewhere strictly, tested on the sorted values."""
    _check_same_h(f_a, f_b)
    a, b = f_a.sorted_values, f_b.sorted_values
    return bool(np.all(a <= b) and np.any(a < b))


def second_order_dominates(f_a: EmpiricalCdf, f_b: EmpiricalCdf, atol: float = config.DOMINANCE_ATOL) -> bool:
    """The integral of F_A - F_B up to y is >= 0 for every y and somewhere > 0.

    The integrand is piecewise constant, so the integral is checked at the merged breakpoints.
    """
    _check_same_h(f_a, f_b)
    points = np.union1d(f_a.sorted_values, f_b.sorted_values)
    difference = evaluate_cdf(f_a, points) - evaluate_cdf(f_b, points)
    integral = np.concatenate(([0.0], np.cumsum(difference[:-1] * np.diff(points))))
    return bool(np.all(integral >= -atol) and np.any(integral > atol))


def reference_cdf_global(y_g: float, h: int) -> ReferenceCdf:
    if h < 1:
        raise MetricInputError("reference CDF needs h >= 1")
    return ReferenceCdf(np.full(h, float(y_g)), "reference", ReferenceKind.GLOBAL)


def reference_cdf_relative(sets: Sequence[SolutionSet]):
    """Pooled best-H reference and the solvers' test CDFs trimmed to their best H values.

    Ties at the H-th pooled value go to the earliest entries in solver order.
    """
    if len(sets) < 2:
        raise MetricInputError("a relative reference needs at least two solvers")
    h = min(s.h for s in sets)
    trimmed = [EmpiricalCdf(build_cdf(s).sorted_values[:h], s.label) for s in sets]

    pool = np.concatenate([cdf.sorted_values for cdf in trimmed])
    owners = np.repeat([cdf.label for cdf in trimmed], h)
    best = np.argsort(pool, kind="stable")[:h]
    reference = ReferenceCdf(pool[best], "reference", ReferenceKind.RELATIVE, tuple(owners[best].tolist()))
    return reference, trimmed


def reference_attribution(reference: ReferenceCdf) -> dict:
    """Number of reference entries contributed by each solver; the counts sum to H."""
    return dict(Counter(reference.provenance))


def area_vs_reference(f_s: EmpiricalCdf, ref: ReferenceCdf, atol: float = config.AREA_ATOL) -> float:
    """Horizontal area between the test CDF and the reference: mean of y_s(z) - y_ref(z)."""
    _check_same_h(f_s, ref)
    if ref.kind == ReferenceKind.GLOBAL:
        area = float(np.mean(f_s.sorted_values)) - float(ref.sorted_values[0])
    else:
        area = float(np.mean(f_s.sorted_values - ref.sorted_values))
    if area < -atol:
        raise ReferenceViolationError(
            f"'{f_s.label}' lies below the reference (area {area:.3e}); the reference does not dominate"
        )
    return max(area, 0.0)


def opisd(area: float) -> float:
    if area < 0:
        raise MetricInputError(f"area must be non-negative, got {area}")
    return 1.0 / (1.0 + area)


def perc(f_s: EmpiricalCdf, ref: ReferenceCdf, eps: float = 0.0) -> float:
    """Percentage of the solver's values on the reference: at the optimum, or matched to a reference entry."""
    _check_same_h(f_s, ref)
    values, reference = f_s.sorted_values, ref.sorted_values
    if ref.kind == ReferenceKind.GLOBAL:
        hits = int(np.count_nonzero(np.abs(values - reference[0]) <= eps))
    elif ref.provenance:
        # pooled entries are consumed once across the group, by the solver they were drawn from
        hits = ref.provenance.count(f_s.label)
    else:
        # each reference entry matches at most one value
        hits = i = j = 0
        while i < len(values) and j < len(reference):
            if abs(values[i] - reference[j]) <= eps:
                hits += 1
                i += 1
                j += 1
            elif values[i] < reference[j]:
                i += 1
            else:
                j += 1
    return 100.0 * hits / f_s.h


def rank_solvers(areas) -> PerformanceReport:
    """Order solvers by descending OPISD, i.e. ascending area; equal areas are ordered by label.

    Accepts a label -> area mapping or SolverRecords computed against one shared reference.
    """
    if isinstance(areas, Mapping):
        records = [SolverRecord(label, float(area), opisd(float(area))) for label, area in areas.items()]
    else:
        records = list(areas)
        digests = {record.reference_digest for record in records}
        if len(digests) > 1:
            raise MixedReferencesError(f"records were computed against {len(digests)} different references")

    ordered = sorted(records, key=lambda record: (record.area, record.label))
    ranked = tuple(
        SolverRecord(r.label, r.area, r.opisd, r.perc, rank, r.reference_digest)
        for rank, r in enumerate(ordered, start=1)
    )
    return PerformanceReport(ranked)


def compare_sets(sets: Sequence[SolutionSet], kind, y_g: Optional[float] = None, eps: float = 0.0) -> PerformanceReport:
    """Full comparison of a group of solvers against a global or a relative reference."""
    kind = ReferenceKind(kind)
    if not sets:
        raise MetricInputError("nothing to compare")
    if kind == ReferenceKind.GLOBAL:
        if y_g is None:
            raise MetricInputError("a global comparison needs y_g")
        sizes = {s.label: s.h for s in sets}
        if len(set(sizes.values())) > 1:
            raise MetricInputError(f"a global comparison needs equal run counts, got {sizes}")
        cdfs = [build_cdf(s) for s in sets]
        reference = reference_cdf_global(y_g, cdfs[0].h)
    else:
        reference, cdfs = reference_cdf_relative(sets)

    records = []
    for cdf in cdfs:
        area = area_vs_reference(cdf, reference)
        records.append(SolverRecord(cdf.label, area, opisd(area), perc(cdf, reference, eps), 0, reference.digest))
    ranked = rank_solvers(records)
    return PerformanceReport(ranked.records, reference.h, reference, eps, tuple(cdfs))


def summary_statistics(values) -> dict:
    array = _values(values)
    if array.size == 0:
        raise MetricInputError("no values to summarize")
    return {
        "count": int(array.size),
        "best": float(array.min()),
        "worst": float(array.max()),
        "mean": float(array.mean()),
        "median": float(np.median(array)),
        "std": float(array.std(ddof=1)) if array.size > 1 else 0.0,
    }


def dominance_matrix(cdfs: Sequence[EmpiricalCdf]) -> list:
    """Pairwise dominance relations between the test CDFs of one comparison group."""
    rows = []
    for a in cdfs:
        for b in cdfs:
            if a is b:
                continue
            rows.append({
                "dominant": a.label,
                "dominated": b.label,
                "deterministic": deterministic_dominance(a, b),
                "first_order": first_order_dominates(a, b),
                "second_order": second_order_dominates(a, b),
            })
    return rows
