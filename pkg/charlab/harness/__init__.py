# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

from charlab.harness.experiments import (
    ExperimentContext,
    build_context,
    check_instance,
    explore_remark2,
    reduce_and_verify_theorem3_style,
    run_experiment,
    run_restart,
    run_restarts,
    verify_theorem1,
    verify_theorem4,
    verify_theorem5,
)
from charlab.harness.report import EXPLORED, FAIL, NO_COUNTEREXAMPLE, PASS, Report, RestartRecord
from charlab.harness.sampling import restart_rng, restart_seed, sample_distribution, sample_marginals
from charlab.harness.search import (
    MembershipObjective,
    SearchResult,
    SearchSettings,
    minimize_residual,
    minimize_residuals,
    project_simplex,
    project_simplex_rows,
)
