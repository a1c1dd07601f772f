"""Application configuration management."""

from functools import lru_cache
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

_OUTPUT_FORMATS = ("text", "json", "csv")
_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class SimulationSettings(BaseSettings):
    """Numerical tolerances and problem-size caps for compilation and simulation."""

    tolerance: float = Field(default=1e-10, alias="COUPLING_TOLERANCE")
    max_qubits: int = Field(default=12, alias="COUPLING_MAX_QUBITS")
    bruteforce_max_qubits: int = Field(default=10, alias="COUPLING_BRUTEFORCE_MAX_QUBITS")
    oracle_max_qubits: int = Field(default=4, alias="COUPLING_ORACLE_MAX_QUBITS")
    efficiency: float = Field(default=1.0, alias="COUPLING_EFFICIENCY")

    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", extra="ignore")

    def resolved_tolerance(self, override: Optional[float] = None) -> float:
        """Return the effective comparison tolerance, falling back to the configured default."""

        if override is not None and override > 0:
            return override
        return self.tolerance if self.tolerance > 0 else 1e-10

    def resolved_efficiency(self, override: Optional[float] = None) -> float:
        """Return the effective per-photon efficiency; range checks happen at the call site."""

        if override is not None:
            return override
        return self.efficiency


@lru_cache(maxsize=1)
def get_simulation_settings() -> SimulationSettings:
    """Cache and return the simulation settings."""

    return SimulationSettings()


class ReportSettings(BaseSettings):
    """Configuration values controlling sweeps and CLI output."""

    sweep_max_qubits: int = Field(default=8, alias="COUPLING_SWEEP_MAX_QUBITS")
    sweep_workers: int = Field(default=1, alias="COUPLING_SWEEP_WORKERS")
    output_format: str = Field(default="text", alias="COUPLING_OUTPUT_FORMAT")
    log_level: str = Field(default="WARNING", alias="COUPLING_LOG_LEVEL")

    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", extra="ignore")

    @field_validator("output_format", mode="before")
    @classmethod
    def _normalise_format(cls, value: object) -> str:
        if value in (None, ""):
            return "text"
        text = str(value).strip().lower()
        if text not in _OUTPUT_FORMATS:
            raise ValueError(f"COUPLING_OUTPUT_FORMAT must be one of {', '.join(_OUTPUT_FORMATS)}.")
        return text

    @field_validator("log_level", mode="before")
    @classmethod
    def _normalise_level(cls, value: object) -> str:
        if value in (None, ""):
            return "WARNING"
        text = str(value).strip().upper()
        if text not in _LOG_LEVELS:
            raise ValueError(f"COUPLING_LOG_LEVEL must be one of {', '.join(_LOG_LEVELS)}.")
        return text

    def resolved_workers(self, override: Optional[int] = None) -> int:
        """Return the effective number of sweep workers, never below one."""

        if override is not None and override >= 1:
            return override
        return max(self.sweep_workers, 1)


@lru_cache(maxsize=1)
def get_report_settings() -> ReportSettings:
    """Cache and return the report settings."""

    return ReportSettings()
