"""
Toolkit configuration management.

``Settings`` reads its values from environment variables when it is
instantiated.  Defaults suit desk-scale runs (arity up to about 10); each
can be overridden by the matching ``BFTK_*`` environment variable.  Command-line
flags override individual fields for a single invocation through
``Settings.override``.
"""

from dataclasses import dataclass, field, replace
import os
from typing import Optional


def _env_bool(name: str, default: str = "false") -> bool:
    return os.getenv(name, default).strip().lower() in {"1", "true", "yes", "on"}


@dataclass
class Settings:
    """Toolkit options; each field falls back to a BFTK_* variable, then to a default."""

    # Environment
    ENVIRONMENT: str = field(default_factory=lambda: os.getenv("BFTK_ENVIRONMENT", "development"))
    DEBUG: bool = field(init=False)
    LOG_LEVEL: str = field(default_factory=lambda: os.getenv("LOG_LEVEL", "INFO"))

    # Relation checks compare floats with an absolute tolerance
    TOLERANCE: float = field(default_factory=lambda: float(os.getenv("BFTK_TOLERANCE", "1e-6")))

    # Campaign execution
    JOBS: int = field(default_factory=lambda: int(os.getenv("BFTK_JOBS", str(os.cpu_count() or 1))))
    SEED: int = field(default_factory=lambda: int(os.getenv("BFTK_SEED", "42")))
    OUTPUT_FORMAT: str = field(default_factory=lambda: os.getenv("BFTK_FORMAT", "json").lower())

    # Eigen-solvers.  Dense symmetric solves are used up to DENSE_MAX_ARITY
    # (a 1024 x 1024 matrix); above that power iteration takes over.
    POWER_TOL: float = field(default_factory=lambda: float(os.getenv("BFTK_POWER_TOL", "1e-10")))
    POWER_MAX_ITER: int = field(default_factory=lambda: int(os.getenv("BFTK_POWER_MAX_ITER", "1000000")))
    DENSE_MAX_ARITY: int = field(default_factory=lambda: int(os.getenv("BFTK_DENSE_MAX_ARITY", "10")))

    # Linear programming
    LP_TOL: float = field(default_factory=lambda: float(os.getenv("BFTK_LP_TOL", "1e-7")))

    # Memo keys for D(f) canonicalised under variable permutations
    D_CANONICAL: bool = field(default_factory=lambda: _env_bool("BFTK_D_CANONICAL"))

    def __post_init__(self) -> None:
        """Normalise the output format and job count, derive DEBUG."""
        self.DEBUG = self.ENVIRONMENT.lower() == "development"
        if self.OUTPUT_FORMAT not in {"json", "csv"}:
            self.OUTPUT_FORMAT = "json"
        self.JOBS = max(1, self.JOBS)

    @property
    def is_development(self) -> bool:
        return self.ENVIRONMENT.lower() == "development"

    def override(
        self,
        tolerance: Optional[float] = None,
        jobs: Optional[int] = None,
        seed: Optional[int] = None,
        output_format: Optional[str] = None,
    ) -> "Settings":
        """Return a copy with the given command-line overrides applied."""
        changes = {}
        if tolerance is not None:
            changes["TOLERANCE"] = tolerance
        if jobs is not None:
            changes["JOBS"] = jobs
        if seed is not None:
            changes["SEED"] = seed
        if output_format is not None:
            changes["OUTPUT_FORMAT"] = output_format.lower()
        return replace(self, **changes)


# A single settings object imported across the toolkit.
settings = Settings()
