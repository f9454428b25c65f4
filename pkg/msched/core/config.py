"""Application configuration settings"""
import logging
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Simulator settings"""

    # Logging
    LOG_LEVEL: str = "INFO"

    # Reproducibility
    DEFAULT_SEED: int = 0

    # Exact solver limits
    ORACLE_NODE_BUDGET: int = 10_000_000
    ORACLE_MAX_UNIT_JOBS: int = 12
    ORACLE_MAX_WEIGHTED_JOBS: int = 7
    ORACLE_MAX_WEIGHTED_WORK: int = 12

    # Subset search used by the packing monitor
    EXACT_FIT_NODE_CAP: int = 2 ** 20

    # Experiment defaults
    EXPERIMENT_TRIALS: int = 200
    EXPERIMENT_HORIZON: int = 100
    EXPERIMENT_WORKERS: int = 1

    # Adaptive adversary picks the drain branch when t1 >= T ** exponent
    DRAIN_THRESHOLD_EXPONENT: float = 0.5

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="MSCHED_",
        case_sensitive=True,
        extra="ignore",
    )

    @property
    def log_level(self) -> int:
        """Get the numeric logging level"""
        return getattr(logging, self.LOG_LEVEL.upper(), logging.INFO)


# Global settings instance
settings = Settings()
