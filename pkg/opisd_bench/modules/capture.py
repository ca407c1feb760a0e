from collections import OrderedDict

from .defs.formatters import format_open_branches
from .defs.meta import ReferenceKind, RunStatus, SampleColumn
from .metrics import SolutionSet, dominance_matrix, summary_statistics
from .utils.log import log_warning


class Capture:
    """Conversions between solver samples, archive rows, solution sets and report tables."""

    @classmethod
    def sample_row(cls, experiment_id, net, sample) -> dict:
        return {
            SampleColumn.EXPERIMENT_ID.value: experiment_id,
            SampleColumn.SOLVER.value: sample.solver,
            SampleColumn.PARAM_CELL.value: sample.param_cell,
            SampleColumn.SEED.value: sample.seed,
            SampleColumn.RUN_INDEX.value: sample.run_index,
            SampleColumn.BEST_VALUE.value: sample.best_value,
            SampleColumn.OPEN_BRANCHES.value: format_open_branches(net, sample.best_config),
            SampleColumn.EVALUATIONS.value: sample.evaluations,
            SampleColumn.ITERATIONS.value: sample.iterations,
            SampleColumn.WALL_TIME.value: sample.wall_time,
            SampleColumn.STATUS.value: RunStatus(sample.status).value,
        }

    @classmethod
    def solution_sets(cls, frame) -> list:
        """One SolutionSet per solver label, in order of first appearance; only `ok` rows count."""
        grouped = OrderedDict()
        skipped = {}
        status_col = SampleColumn.STATUS.value
        for row in frame.to_dict("records"):
            label = row[SampleColumn.SOLVER.value]
            grouped.setdefault(label, [])
            if row[status_col] != RunStatus.OK.value:
                skipped[label] = skipped.get(label, 0) + 1
                continue
            grouped[label].append(float(row[SampleColumn.BEST_VALUE.value]))

        for label, count in skipped.items():
            log_warning(f"{label}: {count} runs without a feasible result are left out of the comparison")
        return [SolutionSet(label, values) for label, values in grouped.items() if values]

    @classmethod
    def report_dict(cls, report) -> dict:
        reference = {
            "kind": report.reference.kind.value,
            "values_digest": report.reference.digest,
        }
        if report.reference.kind == ReferenceKind.GLOBAL:
            reference["y_g"] = float(report.reference.sorted_values[0])
        return {
            "mode": report.reference.kind.value,
            "H": report.h,
            "eps": report.eps,
            "reference": reference,
            "solvers": cls.report_rows(report),
        }

    @classmethod
    def report_rows(cls, report) -> list:
        return [
            {
                "label": record.label,
                "perc_pct": record.perc,
                "area_pu": record.area,
                "opisd": record.opisd,
                "rank": record.rank,
            }
            for record in report.records
        ]

    @classmethod
    def summary_rows(cls, sets) -> list:
        return [{"label": s.label, **summary_statistics(s)} for s in sets]

    @classmethod
    def dominance_rows(cls, report) -> list:
        return dominance_matrix(report.test_cdfs)
