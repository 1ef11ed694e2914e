# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

from charlab.homs.endomorphism import (
    Classification,
    Endomorphism,
    add,
    adjoint,
    apply,
    classify,
    compose,
    endomorphism,
    identity,
    image,
    inverse,
    kernel,
    make_hom,
    preimage,
    scalar,
    subtract,
    zero_hom,
)
from charlab.homs.conditions import (
    CoefficientSystem,
    CollinearityReduction,
    ConditionReport,
    check_condition_11,
    check_condition_12,
    check_condition_12_two_forms,
    collinearity_reduction,
    from_integers,
    make_system,
    system_from_json,
)
