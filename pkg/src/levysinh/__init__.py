"""Sinh-accelerated Fourier and Laplace inversion for Levy models."""
from .errors import *  # noqa: F401,F403
from .models import *  # noqa: F401,F403

__version__ = "0.1.0"
