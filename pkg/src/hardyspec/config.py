"""Run configuration: a single JSON document with a schema version."""
import json
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

SCHEMA_VERSION = 1


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class WeightFields(_Strict):
    family: str
    i: int = 0
    D: Optional[float] = None
    alpha: float = 2.0
    scale: float = 1.0


class MeshFields(_Strict):
    N: int = Field(801, ge=3)
    q: float = Field(0.8, gt=0.0, le=1.0)
    eps_min: float = Field(1e-8, ge=0.0)


class SpectralFields(_Strict):
    k: int = Field(1, ge=1)
    tol: float = Field(1e-12, ge=1e-13)
    threshold: Optional[float] = None


class QuasimodeFields(_Strict):
    eta_grid: List[float] = [0.0, 1.0, 3.0]
    windows: List[float] = [100.0, 200.0, 400.0, 800.0]  # v-lengths
    tol: float = 0.02
    extend_to: Optional[float] = 12800.0


class GrowthFields(_Strict):
    bins: List[float] = [0.0, 400.0, 1.0]  # start, stop, step
    eps: float = 0.1

    @field_validator("bins")
    @classmethod
    def _three(cls, v):
        if len(v) != 3 or not v[2] > 0 or not v[1] > v[0]:
            raise ValueError("bins must be [start, stop, step] with step > 0")
        return v


class OutputFields(_Strict):
    dir: str = "out"
    formats: List[Literal["csv", "json"]] = ["csv", "json"]


class RunConfig(_Strict):
    schema_version: Literal[1] = SCHEMA_VERSION
    scenario: str = "interval-delta2"
    weight: Optional[WeightFields] = None
    mesh: MeshFields = MeshFields()
    spectral: SpectralFields = SpectralFields()
    quasimode: QuasimodeFields = QuasimodeFields()
    growth: GrowthFields = GrowthFields()
    output: OutputFields = OutputFields()
    seed: int = Field(0, ge=0, lt=2 ** 64)
    acceptance: List[str] = [f"A{k}" for k in range(1, 11)]

    @model_validator(mode="after")
    def _known(self):
        from . import acceptance, catalog
        from .scenarios import FAMILIES
        catalog.get(self.scenario)  # raises on unknown names
        if self.weight is not None and self.weight.family not in FAMILIES:
            raise ValueError(f"unknown weight family {self.weight.family!r}")
        bad = [a for a in self.acceptance if a not in acceptance.IDS]
        if bad:
            raise ValueError(f"unknown acceptance ids {bad}")
        return self


def load(path):
    with open(path) as fh:
        return RunConfig.model_validate(json.load(fh))


def dump(cfg):
    return json.dumps(cfg.model_dump(mode="json"), sort_keys=True, indent=1) + "\n"
