"""Configuration settings using Pydantic."""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Numerical tolerances and limits loaded from environment variables."""

    # Inequality chains
    tol: float = Field(default=1e-9, description="Relative-absolute chain tolerance")
    imag_tol: float = Field(default=1e-10, description="Allowed imaginary residue of <Ax,x>")
    unit_tol: float = Field(default=1e-12, description="Allowed deviation of ||x|| from 1")

    # Scalar arithmetic
    scalar_tol: float = Field(default=1e-12, description="Componentwise quaternion comparison tolerance")

    # Operators
    classify_tol: float = Field(default=1e-10, description="Class flag tolerance, scaled by max(1, ||T||)")
    structure_tol: float = Field(default=1e-10, description="Max residual of the quaternionic structure condition")
    max_dim: int = Field(default=64, description="Largest supported dimension n")

    # Spectra
    merge_tol: float = Field(default=1e-7, description="Sphere coalescing tolerance, scaled by max(1, ||T||)")
    rank_tol: float = Field(default=1e-8, description="Singularity tolerance for delta, scaled by max(1, ||T||^2)")
    max_series_terms: int = Field(default=100_000, description="Cap on resolvent series length")

    # Functional calculus
    domain_margin: float = Field(default=1e-9, description="Eigenvalue clamp margin, scaled by max(1, ||T||)")
    kyfan_epsilon: float = Field(default=1e-6, description="Inset of the kyfan domain inside (0, 1/2)")

    # Logging
    log_level: str = Field(default="WARNING", description="Log level")

    model_config = SettingsConfigDict(
        env_prefix="QINEQ_",
        env_file=".env",
        env_file_encoding="utf-8",
    )


# Global settings instance
settings = Settings()
