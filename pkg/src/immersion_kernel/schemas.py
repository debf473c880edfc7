"""Request and response models shared by the HTTP service and the CLI."""
from __future__ import annotations

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field


class RunConfig(BaseModel):
    family: str = Field("theta2", description="built-in name (theta2, theta3, k4) or family file path")
    family_doc: Optional[Dict[str, Any]] = Field(None, description="inline family object; overrides family")
    seed: int = 0
    immersion_respecting: bool = False
    max_oracle_edges: int = 25
    table: Optional[str] = Field(None, description="replacement table file to load and update")


class InstanceRequest(RunConfig):
    instance: str = Field(..., description="instance text: 'v <n>' header and 'e <u> <v>' lines")


class BudgetRequest(InstanceRequest):
    k: int = Field(..., ge=0)


class GenRequest(RunConfig):
    model: Literal["uniform-multigraph", "planted-protrusion", "planted-bouquet"] = "uniform-multigraph"
    n: Optional[int] = Field(None, ge=0)
    m: Optional[int] = Field(None, ge=0)
    k: int = Field(1, ge=1, description="planted OPT for planted-protrusion")
    count: Optional[int] = Field(None, ge=1, description="bouquet elements; defaults to dF")


class Stats(BaseModel):
    iterations: int = 0
    replacements: int = 0
    prunings: int = 0


class Report(BaseModel):
    """One command's outcome. ``solution`` uses the input file's edge ids."""

    schema_: str = Field(..., alias="schema")
    command: str
    family: str
    status: Literal["ok", "no"] = "ok"
    solution: Optional[List[int]] = None
    verified: bool = False
    opt_bound: Optional[int] = None
    stats: Stats = Stats()
    details: Dict[str, Any] = Field(default_factory=dict)

    model_config = {"populate_by_name": True}

    def doc(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True)


class GenResponse(BaseModel):
    instance: str
    truth: Dict[str, Any]


class ErrorBody(BaseModel):
    kind: Literal["parse", "family", "resource", "precondition"]
    message: str
