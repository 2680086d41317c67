"""Randomized-measurement protocol: draws, execution, datasets, estimators, tomography."""

from .dataset import (
    MeasurementDataset,
    check_aligned,
    collect_dataset,
    execute_draw,
    trim_to_common_prefix,
)
from .designs import (
    TwoDesignSet,
    UnitaryDraw,
    enumerate_draws,
    get_design,
    sample_draw,
    sample_draws,
)
from .estimators import (
    estimate_max_fidelity,
    estimate_max_process_fidelity,
    estimate_process_overlap,
    estimate_purity,
    estimate_state_overlap,
    overlap_contributions,
    plugin_purity_bias,
)
from .execution import conditional_table, run_ancilla_assisted, run_ancilla_free, run_state
from .jackknife import jackknife_stderr
from .tomography import TomographyResult, project_to_density_matrix, randomized_qpt, randomized_qst
