"""
Utility classes for bessel-rkbs
Includes the shared exceptions, ValueParser for exact user input and Logger for file logging
"""
import re
import logging
from fractions import Fraction
from pathlib import Path


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation"""


class ConfigurationError(ValueError):
    """A discretization or run configuration cannot be used"""

    def __init__(self, message, minimal_period=None):
        super().__init__(message)
        self.minimal_period = minimal_period


class ValueParser:
    """Classifies and parses numeric text without losing exactness"""

    def __init__(self):
        self.rational_pattern = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")
        self.decimal_pattern = re.compile(
            r"^\s*[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?\s*$"
        )
        self.infinity_pattern = re.compile(r"^\s*\+?(inf|infinity|∞)\s*$", re.IGNORECASE)

    def is_rational(self, text):
        """
        Check if text is an exact rational such as "3" or "-3/2"

        Args:
            text (str): User input

        Returns:
            bool: True for integer or num/den text
        """
        if not text:
            return False
        return self.rational_pattern.match(text) is not None

    def is_decimal(self, text):
        """Check if text is a decimal or scientific literal"""
        if not text:
            return False
        return self.decimal_pattern.match(text) is not None

    def is_infinity(self, text):
        """Check if text names the distinguished value infinity"""
        if not text:
            return False
        return self.infinity_pattern.match(text) is not None

    def parse_rational(self, text, allow_decimal=False):
        """
        Parse text into an exact Fraction

        Args:
            text (str): "num/den", an integer, or a decimal when allowed
            allow_decimal (bool): Accept decimal literals (numeric commands only)

        Returns:
            Fraction: The exact value

        Raises:
            ValueError: Malformed text, zero denominator, or a decimal where exactness is required
        """
        text = str(text)
        match = self.rational_pattern.match(text)
        if match:
            numerator, denominator = match.group(1), match.group(2)
            if denominator is not None and int(denominator) == 0:
                raise ValueError(f"zero denominator in {text!r}")
            return Fraction(int(numerator), int(denominator or 1))
        if self.is_decimal(text):
            if not allow_decimal:
                raise ValueError(f"{text!r} is not an exact rational; write it as num/den")
            return Fraction(text.strip())
        raise ValueError(f"cannot parse {text!r} as a rational")


class Logger:
    """File-based logger for runs and numerical diagnostics"""

    def __init__(self, log_dir="logs", debug_mode=False):
        self.log_dir = Path(log_dir)
        self.log_dir.mkdir(parents=True, exist_ok=True)
        self.debug_mode = debug_mode

        # Setup main logger
        self.main_logger = self._setup_logger(
            "rkbs_main",
            self.log_dir / "rkbs.log",
            logging.INFO if not debug_mode else logging.DEBUG
        )

        # Setup numerics debug logger
        self.numerics_logger = self._setup_logger(
            "rkbs_numerics",
            self.log_dir / "numerics_debug.log",
            logging.DEBUG
        )

    def _setup_logger(self, name, log_file, level):
        """Setup a logger with file handler"""
        logger = logging.getLogger(name)
        logger.setLevel(level)

        # Avoid duplicate handlers
        if logger.handlers:
            return logger

        fh = logging.FileHandler(log_file, encoding='utf-8')
        fh.setLevel(level)

        formatter = logging.Formatter(
            '%(asctime)s | %(levelname)s | %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        fh.setFormatter(formatter)
        logger.addHandler(fh)

        # Console handler for debug mode
        if self.debug_mode:
            ch = logging.StreamHandler()
            ch.setLevel(level)
            ch.setFormatter(formatter)
            logger.addHandler(ch)

        return logger

    def info(self, message):
        """Log info message"""
        self.main_logger.info(message)

    def debug(self, message):
        """Log debug message"""
        self.main_logger.debug(message)

    def error(self, message):
        """Log error message"""
        self.main_logger.error(message)

    def warning(self, message):
        """Log warning message"""
        self.main_logger.warning(message)

    def experiment_start(self, suite, params):
        """Log the start of a verification suite"""
        rendered = ", ".join(f"{key}={value}" for key, value in sorted(params.items()))
        self.numerics_logger.debug(f"SUITE START | {suite} | {rendered}")

    def experiment_result(self, suite, passed, elapsed):
        """Log the outcome of a verification suite"""
        status = "PASS" if passed else "FAIL"
        self.numerics_logger.debug(f"SUITE RESULT | {suite} | {status} | Time: {elapsed:.2f}s")
        if not passed:
            self.main_logger.warning(f"Suite {suite} failed")

    def quadrature(self, label, value, abserr):
        """Log a quadrature estimate and its error estimate"""
        self.numerics_logger.debug(f"QUADRATURE | {label} | Value: {value!r} | Abserr: {abserr:.3e}")

    def command(self, name, exit_code):
        """Log a finished cli command"""
        self.main_logger.info(f"COMMAND | {name} | Exit: {exit_code}")
