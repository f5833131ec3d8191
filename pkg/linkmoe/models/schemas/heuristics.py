from pydantic import BaseModel, ConfigDict, Field


class HeuristicConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    katz_beta: float = Field(0.05, gt=0.0, lt=1.0)
    katz_max_len: int = Field(3, ge=1, le=6)
    ppr_alpha: float = Field(0.15, gt=0.0, lt=1.0)
    ppr_eps: float = Field(1e-4, gt=0.0)
    sp_cap: int = Field(7, ge=1)
