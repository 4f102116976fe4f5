from servmine.harness.experiment import (
    ExperimentReport,
    ExperimentRow,
    SweepPoint,
    export_csv,
    report_to_csv,
    run_experiment,
    sweep_from_dict,
)

__all__ = [
    "ExperimentReport",
    "ExperimentRow",
    "SweepPoint",
    "export_csv",
    "report_to_csv",
    "run_experiment",
    "sweep_from_dict",
]
