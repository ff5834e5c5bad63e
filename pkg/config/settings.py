"""
Koszul CY Toolkit - Configuration Settings
Centralized defaults for scalars, truncation, reporting and the self-test.
"""

from pathlib import Path

from pydantic_settings import BaseSettings

BASE_DIR = Path(__file__).resolve().parent.parent


class ScalarSettings(BaseSettings):
    """Coefficient ring selection."""
    DEFAULT_SCALAR: str = "q"  # q, z, or fp:<p>

    class Config:
        env_prefix = "KCY_SCALAR_"


class TruncationSettings(BaseSettings):
    """Cobar/bar truncation and window defaults."""

    LENGTH_CAP: int = 4  # weight cap L on cobar/bar words
    WINDOW_LO: int = 0  # lowest reported degree
    WINDOW_HI: int = 3  # highest reported degree
    U_TRUNCATION: int = 3  # N, powers of u kept in (negative) cyclic chains

    # Coset enumeration bound used to decide that pi1 is finite
    COSET_LIMIT: int = 2000

    # Two-sided twisted complexes larger than this get a lower filtration level
    TWO_SIDED_BASIS_LIMIT: int = 6000

    # coHochschild complexes larger than this stop the fundamental cycle lift
    COHOCHSCHILD_BASIS_LIMIT: int = 60000

    # Iterated reduced coproducts deeper than this count as non-conilpotent
    CONILPOTENCY_DEPTH: int = 64

    class Config:
        env_prefix = "KCY_TRUNC_"


class ReportSettings(BaseSettings):
    """Report emission."""
    INDENT: int = 2
    INCLUDE_TIMINGS: bool = False  # wall-clock seconds per stage in reports
    LOG_LEVEL: str = "WARNING"

    class Config:
        env_prefix = "KCY_REPORT_"


class SelftestSettings(BaseSettings):
    """Randomized structural identity suite."""
    SEED: int = 20240611
    RANDOM_CASES: int = 100
    MAX_RANK: int = 6  # reduced rank of random coalgebras/algebras
    MAX_DEGREE: int = 4

    class Config:
        env_prefix = "KCY_SELFTEST_"


class AppSettings:
    """Main application settings aggregator."""

    def __init__(self):
        self.scalars = ScalarSettings()
        self.truncation = TruncationSettings()
        self.reports = ReportSettings()
        self.selftest = SelftestSettings()
        self.base_dir = BASE_DIR


# Global settings instance
settings = AppSettings()
