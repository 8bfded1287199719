"""Distribution of integers in [1, 2^n] by number of prime factors."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DomainError,
    IntegrityError,
    OmegaTriangleError,
    ParseError,
    PreconditionError,
    ResourceExhaustedError,
    UsageError,
)
from .omega_sieve import base_primes, count_dimensions, sieve_segment  # noqa: E402
from .triangle import (  # noqa: E402
    DistributionRow,
    Triangle,
    build_triangle,
    export_triangle,
    import_triangle,
)

__all__ = [
    "DistributionRow",
    "DomainError",
    "IntegrityError",
    "OmegaTriangleError",
    "ParseError",
    "PreconditionError",
    "ResourceExhaustedError",
    "Triangle",
    "UsageError",
    "base_primes",
    "build_triangle",
    "count_dimensions",
    "export_triangle",
    "import_triangle",
    "sieve_segment",
]
