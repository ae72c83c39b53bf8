"""Threshold-issued offline e-cash: compact and divisible wallets over BLS12-381."""

from .groups import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
