# ============================================================================
# APPLICATION SETTINGS FOR SPECROUND
# ============================================================================
# Tunables for the spectral rounding pipeline. Every value can be overridden
# with a SPECROUND_* environment variable or a .env file.

from typing import Optional

from dotenv import load_dotenv
from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load environment variables from .env file if present
load_dotenv()

DOF_MODES = ("secondary", "with-links")


class Settings(BaseSettings):
    """Application settings loaded from environment variables

    Library functions read their defaults from the singleton below when a
    keyword argument is left as None, so CLI flags, environment variables
    and .env files all end up here.
    """

    model_config = SettingsConfigDict(env_prefix="SPECROUND_", extra="ignore")

    # Rounding parameters: binarization confidence and eigenvectors used
    delta: float = 0.1
    eigen_count: int = 40

    # Latent class model learning
    restarts: int = 5
    seed: int = 0
    smoothing: float = 1e-4
    em_tol: float = 1e-6
    em_max_iter: int = 500
    max_clusters: int = 20

    # Free-parameter count used by the latent tree model BIC
    ltm_dof_mode: str = "secondary"

    # K-means baseline
    kmeans_max_iter: int = 300

    # Parallelism cap for restarts, the q-loop and sweeps
    threads: int = 1

    # Logging
    log_level: str = "INFO"
    log_format: str = "text"
    log_file: Optional[str] = None

    @field_validator("delta")
    @classmethod
    def _delta_in_open_unit_interval(cls, value: float) -> float:
        if not 0.0 < value < 1.0:
            raise ValueError("delta must lie in the open interval (0, 1)")
        return value

    @field_validator("smoothing")
    @classmethod
    def _smoothing_is_small(cls, value: float) -> float:
        if not 0.0 < value < 0.5:
            raise ValueError("smoothing must lie in (0, 0.5)")
        return value

    @field_validator("eigen_count", "restarts", "em_max_iter", "max_clusters", "threads")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be a positive integer")
        return value

    @field_validator("ltm_dof_mode")
    @classmethod
    def _known_dof_mode(cls, value: str) -> str:
        if value not in DOF_MODES:
            raise ValueError(f"ltm_dof_mode must be one of {DOF_MODES}")
        return value

    @field_validator("log_format")
    @classmethod
    def _known_log_format(cls, value: str) -> str:
        if value not in ("text", "json"):
            raise ValueError("log_format must be 'text' or 'json'")
        return value


# Create a singleton instance of the settings
settings = Settings()
