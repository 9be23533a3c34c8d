from .render import ReportBundle, ReportError, emit_reports, render_files
from .reports import (
    DIGITAL,
    LUDIQUE,
    NARRATIF,
    PAPER,
    BonusCapture,
    CardReport,
    CohortTotals,
    ContextTotals,
    EmptyContextError,
    SessionSegment,
    StudentReport,
    SuccessPoint,
    UnknownPlayerError,
    bonus_capture_rate,
    card_error_rates,
    cohort_totals,
    read_group_map,
    read_paper_records,
    read_tallies,
    reconstruct_sessions,
    student_report,
    student_reports,
    success_vs_time,
    write_group_map,
)
from .stats import ChiSquareResult, chi2_sf_1dof, chi_squared_2x2, median, table_from_tallies

__all__ = [
    "BonusCapture",
    "CardReport",
    "ChiSquareResult",
    "CohortTotals",
    "ContextTotals",
    "DIGITAL",
    "EmptyContextError",
    "LUDIQUE",
    "NARRATIF",
    "PAPER",
    "ReportBundle",
    "ReportError",
    "SessionSegment",
    "StudentReport",
    "SuccessPoint",
    "UnknownPlayerError",
    "bonus_capture_rate",
    "card_error_rates",
    "chi2_sf_1dof",
    "chi_squared_2x2",
    "cohort_totals",
    "emit_reports",
    "median",
    "read_group_map",
    "read_paper_records",
    "read_tallies",
    "reconstruct_sessions",
    "render_files",
    "student_report",
    "student_reports",
    "success_vs_time",
    "table_from_tallies",
    "write_group_map",
]
