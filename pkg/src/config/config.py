import os
from pathlib import Path

from dotenv import load_dotenv


def load_env_file(env_file_path):
    """Load environment variables from a .env file without overriding existing ones."""
    if not os.path.exists(env_file_path):
        return False
    return load_dotenv(env_file_path, override=False)


def _env_bool(name: str, default: bool) -> bool:
    return os.getenv(name, "true" if default else "false").strip().lower() in {"1", "true", "yes"}


class Config:
    """Configuration class backed by the process environment and config/local.env."""

    def __init__(self):
        self._load_env_files()

        # Note: We can't use logger here as logging isn't set up yet

    def _load_env_files(self):
        """Load environment variables from the local .env file."""
        project_root = Path(__file__).parent.parent.parent
        local_env = project_root / "config" / "local.env"
        load_env_file(local_env)
        self._env_file_loaded = str(local_env)

    @property
    def environment(self):
        """Current environment string."""
        return os.getenv("ENVIRONMENT", "local")

    @property
    def log_level(self):
        """Log level for the application."""
        return os.getenv("LOG_LEVEL", "INFO").upper()

    @property
    def threads(self):
        """Worker threads for candidate and grid evaluation (0 means all cores)."""
        return int(os.getenv("SAMPLESIZE_THREADS", 1))

    @property
    def search_mode(self):
        """Default sample-size search mode."""
        mode = os.getenv("SAMPLESIZE_SEARCH", "ascending").lower()
        if mode not in {"ascending", "accelerated"}:
            raise ValueError(f"SAMPLESIZE_SEARCH must be ascending or accelerated, got {mode!r}")
        return mode

    @property
    def fast_path_enabled(self):
        """Whether the log-space pre-screen is used before exact evaluation."""
        return _env_bool("SAMPLESIZE_FAST_PATH", False)

    @property
    def fast_path_guard(self):
        """Guard band in log space; candidates this close to the minimum are evaluated exactly."""
        return float(os.getenv("SAMPLESIZE_FAST_PATH_GUARD", "1e-9"))

    @property
    def binom_cache_size(self):
        """Maximum number of memoized binomial coefficients."""
        return int(os.getenv("SAMPLESIZE_BINOM_CACHE", 65536))

    @property
    def verify_seed(self):
        """Default seed for verification grids."""
        return int(os.getenv("SAMPLESIZE_VERIFY_SEED", 7))

    def get_debug_info(self):
        """Get configuration debug information for logging."""
        return {
            "current_working_directory": os.getcwd(),
            "env_file_loaded": getattr(self, "_env_file_loaded", "none"),
            "environment": self.environment,
            "log_level": self.log_level,
            "threads": self.threads,
            "search_mode": self.search_mode,
            "fast_path_enabled": self.fast_path_enabled,
            "fast_path_guard": self.fast_path_guard,
            "binom_cache_size": self.binom_cache_size,
            "verify_seed": self.verify_seed,
        }


# Global config instance
config = Config()
