# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

from charlab.group.abelian import (
    Element,
    FiniteAbelianGroup,
    catalog,
    group_from_json,
    invariant_factors,
    is_isomorphic,
    make_group,
    pairing,
    parse_group,
)
from charlab.group.subgroup import (
    Subgroup,
    annihilator,
    full_subgroup,
    span,
    subgroup_from_generators,
    subgroup_intersect,
    subgroup_sum,
    trivial_subgroup,
)
