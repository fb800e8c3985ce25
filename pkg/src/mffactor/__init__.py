"""Multi-frequency factorization method for wave-number-dependent sources."""

__version__ = "0.1.0"

from .errors import MFFactorError  # noqa: E402

__all__ = ["MFFactorError", "__version__"]
