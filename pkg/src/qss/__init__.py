"""Covariance-level and Monte Carlo simulation of (2,3) threshold quantum state sharing."""

from .config import ScenarioConfig
from .gaussian import GaussianState, Quad, QuadratureIndex, SqueezerSpec
from .protocol import AccessStructure, ReconstructionResult, ShareSet

__all__ = [
    "AccessStructure",
    "GaussianState",
    "Quad",
    "QuadratureIndex",
    "ReconstructionResult",
    "ScenarioConfig",
    "ShareSet",
    "SqueezerSpec",
]
