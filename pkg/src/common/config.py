import os

from dotenv import load_dotenv
from pydantic_settings import BaseSettings

# Load environment variables from .env file
load_dotenv()


class Settings(BaseSettings):
    """Library settings."""
    # Logging: off, info or debug
    CONELENGTH_LOG: str = os.getenv("CONELENGTH_LOG", "off")

    # Numerical tolerances
    CLAMP_TOLERANCE: float = float(os.getenv("CLAMP_TOLERANCE", "1e-12"))  # arccos/arccosh boundary slack
    SOLVER_TOLERANCE: float = float(os.getenv("SOLVER_TOLERANCE", "1e-10"))  # 1-D residuals
    LINEAR_TOLERANCE: float = float(os.getenv("LINEAR_TOLERANCE", "1e-8"))  # 4x4 back-substitution
    VOTE_TOLERANCE: float = float(os.getenv("VOTE_TOLERANCE", "1e-6"))  # root selection
    END_TO_END_TOLERANCE: float = float(os.getenv("END_TO_END_TOLERANCE", "1e-6"))  # re-simulation
    CONDITION_LIMIT: float = float(os.getenv("CONDITION_LIMIT", "1e12"))
    BISECTION_BAND: float = float(os.getenv("BISECTION_BAND", "1e-8"))  # arccoth fallback band
    TRACE_SNAP: float = float(os.getenv("TRACE_SNAP", "1e-10"))  # |u - 1| below this reads as a cusp

    # Run defaults (overridable from the command line)
    MAX_TWIST_INDEX: int = int(os.getenv("MAX_TWIST_INDEX", "20"))
    OUTPUT_FORMAT: str = os.getenv("OUTPUT_FORMAT", "table")
    PARALLELISM: int = int(os.getenv("PARALLELISM", "1"))

    model_config = {
        "env_file": ".env",
        "case_sensitive": True,
        "extra": "allow"  # Allow extra fields in environment variables
    }


# Create settings instance
settings = Settings()
