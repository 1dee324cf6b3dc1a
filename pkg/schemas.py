# schemas.py
from __future__ import annotations

from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from settings import MAX_DEGREE

# =========================
# Base model configurations
# =========================

class FileBase(BaseModel):
    """Base for the on-disk JSON format. Unknown keys are rejected so a misspelled field surfaces
    as a ParseError with its path instead of being ignored."""
    model_config = ConfigDict(extra="forbid")


# ======================================================
# File format: groups
# ======================================================

class TableGroupFile(FileBase):
    kind: Literal["table"]
    table: List[List[int]]
    generators: Optional[List[int]] = None
    name: Optional[str] = None
    # optional rendering of each element, same order as the table
    degree: Optional[int] = Field(None, ge=1, le=MAX_DEGREE)
    permutations: Optional[List[str]] = None
    labels: Optional[List[str]] = None

    @model_validator(mode="after")
    def _renderings_match_table(self):
        if self.permutations is not None:
            if self.degree is None:
                raise ValueError("'permutations' requires 'degree'")
            if len(self.permutations) != len(self.table):
                raise ValueError("'permutations' must list one permutation per table row")
        if self.labels is not None and len(self.labels) != len(self.table):
            raise ValueError("'labels' must list one label per table row")
        return self


class PermGroupFile(FileBase):
    kind: Literal["perm"]
    degree: int = Field(..., ge=1, le=MAX_DEGREE)
    generators: List[str]
    name: Optional[str] = None


GroupFile = Annotated[Union[TableGroupFile, PermGroupFile], Field(discriminator="kind")]


# ======================================================
# File format: crossed modules, morphisms, sequences
# ======================================================

class XModFile(FileBase):
    g1: GroupFile
    g2: GroupFile
    boundary: List[int]
    action: List[List[int]]
    name: Optional[str] = None


class MapPair(FileBase):
    f1: List[int]
    f2: List[int]


class MorphismFile(FileBase):
    source: XModFile
    target: XModFile
    f1: List[int]
    f2: List[int]


class SequenceFile(FileBase):
    n: XModFile
    t: XModFile
    q: XModFile
    kappa: MapPair
    alpha: MapPair


# ======================================================
# Reports
# ======================================================

class InputDigest(BaseModel):
    ref: str
    kind: str
    sha256: str


class SuiteRow(BaseModel):
    claim: str
    expected: str
    computed: str
    passed: bool


class Report(BaseModel):
    """Envelope printed by every command. Serialized with sorted keys; `wall_ms` is only set when
    the caller asked for timing."""
    command: str
    args: Dict[str, Any] = Field(default_factory=dict)
    inputs: List[InputDigest] = Field(default_factory=list)
    outcome: Dict[str, Any] = Field(default_factory=dict)
    verdicts: Dict[str, bool] = Field(default_factory=dict)
    ok: bool
    exit_code: int = Field(..., ge=0, le=3)
    wall_ms: Optional[int] = None
