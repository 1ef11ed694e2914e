# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field

from charlab.api_schema.config import Coefficient


class WithOutput(BaseModel):
    out: Optional[str] = Field(None, description="Write the result to this file instead of stdout.")
    format: Literal["json", "csv"] = Field("json", description="Output format.")


class WithSystem(WithOutput):
    moduli: List[int] = Field(..., min_length=1, description="Cyclic factor orders of the group X.")
    alphas: List[List[Coefficient]] = Field(
        ..., min_length=1,
        description="m x n coefficient grid; integers act as scalars, matrices as endomorphisms.",
    )


class CheckConditionsPayload(WithSystem):
    pass


class DmkTestPayload(WithSystem):
    marginals: Optional[List[List[float]]] = Field(
        None, description="One probability list per variable; seeded samples when omitted."
    )
    k: Optional[int] = Field(None, ge=1, description="Class index k of D_{m,k}; defaults to m-1.")
    seed: int = Field(0, ge=0, description="Seed for sampled marginals.")
    floor: float = Field(0.6, gt=0.5, lt=1.0, description="Point-mass weight of sampled marginals.")
    tol: Optional[float] = Field(None, gt=0, description="Membership tolerance; LCA_CHARLAB_DEFAULT_TOL when omitted.")
    include_tables: bool = Field(False, description="Emit factor tables instead of their sizes.")


class RunExperimentPayload(WithOutput):
    config: Dict[str, Any] = Field(..., description="Experiment config, flags already merged in.")


class CatalogPayload(WithOutput):
    max_order: int = Field(16, ge=1, description="List every abelian group of order up to this.")
