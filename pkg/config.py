"""
Configuration Management for bessel-rkbs
Loads settings from .env and config.json
"""
import os
import json
from pathlib import Path
from dotenv import load_dotenv


DEFAULT_GRID_BUDGET = 2 ** 24


def _int_setting(name, default):
    """Read an integer environment variable, falling back to the default"""
    raw = os.getenv(name, str(default))
    try:
        return int(raw)
    except ValueError:
        print(f"Warning: {name}={raw!r} is not an integer, using {default}")
        return default


class Config:
    """Manages run configuration from environment variables and config files"""

    def __init__(self, env_file=".env", config_file="data/config.json"):
        # Load .env file
        load_dotenv(env_file)

        # Output
        self.output_dir = os.getenv("BESSEL_RKBS_OUTPUT_DIR", "reports")
        self.log_dir = os.getenv("LOG_DIR", "logs")
        self.debug_mode = os.getenv("DEBUG_MODE", "false").lower() == "true"

        # Numerics
        self.grid_budget = _int_setting("GRID_BUDGET", DEFAULT_GRID_BUDGET)
        self.default_seed = _int_setting("DEFAULT_SEED", 7)
        self.max_workers = _int_setting("MAX_WORKERS", 4)
        self.reference_period = float(os.getenv("REFERENCE_PERIOD", "84"))
        self.reference_points = _int_setting("REFERENCE_POINTS", 4096)

        # Additional settings from config.json
        self.config_file = config_file
        self._load_json_config()

    def _load_json_config(self):
        """Load additional settings from config.json if it exists"""
        if os.path.exists(self.config_file):
            try:
                with open(self.config_file, 'r', encoding='utf-8') as f:
                    config_data = json.load(f)
                    # Extend settings from JSON, environment wins
                    for key, value in config_data.items():
                        if not hasattr(self, key):
                            setattr(self, key, value)
            except Exception as e:
                print(f"Warning: Could not load config.json: {e}")

    def save_to_json(self):
        """Save current configuration to config.json"""
        Path(self.config_file).parent.mkdir(parents=True, exist_ok=True)
        config_data = {
            "debug_mode": self.debug_mode,
            "grid_budget": self.grid_budget,
            "default_seed": self.default_seed,
            "max_workers": self.max_workers,
            "reference_period": self.reference_period,
            "reference_points": self.reference_points,
        }
        with open(self.config_file, 'w', encoding='utf-8') as f:
            json.dump(config_data, f, indent=2, ensure_ascii=False)

    def is_configured(self):
        """Check that the numeric settings describe a usable run"""
        n = self.reference_points
        return (
            self.grid_budget >= 16
            and self.max_workers >= 1
            and self.reference_period > 0
            and n >= 16
            and n & (n - 1) == 0
            and n <= self.grid_budget
        )

    def reference_grid(self, d=1):
        """
        Build the reference grid for dimension d

        Args:
            d (int): Spatial dimension (1, 2 or 3)

        Returns:
            GridSpec: Grid with the configured period, points and budget
        """
        from spectral import GridSpec

        return GridSpec(d=d, n=self.reference_points, L=self.reference_period,
                        budget=self.grid_budget)
