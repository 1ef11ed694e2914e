# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

from charlab.feq.characterization import (
    CramerReport,
    MarcinkiewiczReport,
    QIndependenceReport,
    cramer_factor_check,
    marcinkiewicz_check,
    q_independence_residual,
)
from charlab.feq.differences import (
    GroupFunction,
    character_function,
    constant,
    difference,
    log_modulus,
    multiplicative_degree,
    phase_log,
    polynomial_degree,
    wrap_phase,
)
from charlab.feq.dmk import (
    DmkReport,
    MixedDifferencePlan,
    anchored_interactions,
    averaged_mixed_difference,
    interaction_residual,
    is_in_Dmk,
)
from charlab.feq.elimination import (
    EliminationCertificate,
    Lemma1Report,
    ReplayReport,
    ShiftRecord,
    certificate_from_json,
    eliminate_lemma1,
    eliminate_lemma2,
    equation3_residual,
    replay_certificate,
)
