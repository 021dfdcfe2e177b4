"""Configuration settings for l1rom.

This module provides a Pydantic Settings class for loading and validating
solver and output defaults from environment variables.
"""

from functools import lru_cache

from pydantic import BaseSettings, Field


class Settings(BaseSettings):
    """Runtime defaults loaded from environment variables."""

    # Output settings
    output_dir: str = Field(default="results", env="L1ROM_OUTPUT_DIR")
    log_level: str = Field(default="INFO", env="L1ROM_LOG_LEVEL")

    # Reproducibility and concurrency
    default_seed: int = Field(default=0, env="L1ROM_DEFAULT_SEED")
    threads: int = Field(default=1, env="L1ROM_THREADS")

    # Minimizer defaults
    lp_max_rows: int = Field(default=5000, env="L1ROM_LP_MAX_ROWS")
    irls_max_iterations: int = Field(default=200, env="L1ROM_IRLS_MAX_ITERATIONS")
    default_eta: float = Field(default=1e-8, env="L1ROM_DEFAULT_ETA")
    default_eps_tol: float = Field(default=1e-4, env="L1ROM_DEFAULT_EPS_TOL")

    # Dictionary rank handling
    perturb_eps: float = Field(default=1e-12, env="L1ROM_PERTURB_EPS")
    rank_tol: float = Field(default=1e-10, env="L1ROM_RANK_TOL")

    class Config:
        """Pydantic configuration."""
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = False


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance.

    Returns:
        Settings: l1rom settings instance
    """
    return Settings()
