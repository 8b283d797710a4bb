"""
Runtime settings for csrec.

Values come from the repository .env (if present) and the process
environment, then get overridden by CLI flags. Only CSREC_SEED changes
results; precision and thread count only change speed and accuracy.
"""

import math
import os
from dataclasses import dataclass, replace
from typing import Optional

from dotenv import load_dotenv

# Load environment variables
env_path = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), '.env')
load_dotenv(env_path)

DEFAULT_SEED = 20240611
DEFAULT_PRECISION = 64
MIN_PRECISION = 53
MAX_PRECISION = 512

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'data')


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        return int(raw)
    except ValueError:
        return default


def digits_to_bits(digits: int) -> int:
    """Decimal digits -> mantissa bits (rounded up)."""
    return int(math.ceil(digits * math.log2(10)))


def bits_to_digits(bits: int) -> int:
    return int(math.floor(bits * math.log10(2)))


@dataclass(frozen=True)
class Settings:
    """
    Precision, tolerances and seed shared by every stage.

    Tolerances tighten as precision grows; the fixed thresholds quoted by the
    checks (1e-10 residuals, 1e-6 integrality) are upper bounds.
    """
    precision: int = DEFAULT_PRECISION
    seed: int = DEFAULT_SEED
    threads: int = 1
    tolerance: float = 1e-6
    flattening_tol: float = 1e-6
    cluster_tol: float = 1e-8
    max_retries: int = 10

    def __post_init__(self):
        if not MIN_PRECISION <= self.precision <= MAX_PRECISION:
            raise ValueError(
                f"precision must be in [{MIN_PRECISION}, {MAX_PRECISION}] bits, got {self.precision}")

    @property
    def digits(self) -> int:
        return bits_to_digits(self.precision)

    @property
    def residual_tol(self) -> float:
        return min(1e-10, 10.0 ** (-(self.digits - 5)))

    @property
    def chain_tol(self) -> float:
        # 1e-12 at 64 bits, tighter with more bits
        return min(1e-12, 10.0 ** (-(self.digits - 7)))

    @property
    def degeneracy_tol(self) -> float:
        return min(1e-9, 10.0 ** (-(self.digits // 2)))

    def with_digits(self, digits: int) -> 'Settings':
        return replace(self, precision=max(MIN_PRECISION, min(MAX_PRECISION, digits_to_bits(digits))))

    def with_overrides(self, **kwargs) -> 'Settings':
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **kwargs)

    @classmethod
    def from_env(cls, threads: Optional[int] = None) -> 'Settings':
        precision = _env_int('CSREC_PRECISION', DEFAULT_PRECISION)
        precision = max(MIN_PRECISION, min(MAX_PRECISION, precision))
        return cls(
            precision=precision,
            seed=_env_int('CSREC_SEED', DEFAULT_SEED),
            threads=threads or _env_int('CSREC_THREADS', os.cpu_count() or 1),
        )


DEFAULT_SETTINGS = Settings()
