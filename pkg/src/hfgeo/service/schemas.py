from typing import Any, Literal, Optional

from pydantic import BaseModel, Field


class ComplexRequest(BaseModel):
    text: str = Field(..., description="contents of an hfcx v1 file")


class SurgeryRequest(ComplexRequest):
    slope: Optional[str] = None
    framing: Optional[list[int]] = None
    window: Optional[int] = Field(None, ge=1)
    crosscheck: bool = False


class RandomRequest(BaseModel):
    seed: int = 0
    kind: Literal["knot", "link"] = "knot"
    parts: int = Field(3, ge=1, le=8)
    deform: int = Field(3, ge=0, le=50)


class ErrorInfo(BaseModel):
    name: str
    message: str


class ReportResponse(BaseModel):
    command: str
    exit_code: int
    input_digest: Optional[str] = None
    body: dict[str, Any] = {}
    error: Optional[ErrorInfo] = None
    timings: dict[str, float] = {}
