from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class AnalysisRequest(BaseModel):
    """Body accepted by every analysis endpoint.

    Exactly one of ``document`` (an inline ``bv-algebra/1`` description) or
    ``instance`` (the name of a bundled corpus instance) must be given.
    """

    document: Optional[dict] = None
    instance: Optional[str] = None
    seed: Optional[int] = Field(default=None, description="seeded inner product override")
    tau_order: int = Field(default=4, ge=1)
    hbar_order: Optional[int] = Field(default=6, ge=0)
    kmax: int = Field(default=6, ge=1)


class StageReport(BaseModel):
    """Envelope for a single-stage report."""

    report: dict


class CorpusList(BaseModel):
    positive: list[str]
    negative: list[str]


class Health(BaseModel):
    status: str
    version: str
