"""Embedding-dimension selection for networks by signflip parallel analysis."""
from .dcsbm import DcsbmParams, preset_fig1, preset_fig2, sample_adjacency
from .exceptions import InvalidInputError, ModelValidityError
from .flippa import FlipConfig, SelectionResult, embed, select_dimension, signflip
from .normadj import build_normalized_adjacency
from .rng import RngStream

__all__ = [
    "DcsbmParams",
    "FlipConfig",
    "InvalidInputError",
    "ModelValidityError",
    "RngStream",
    "SelectionResult",
    "build_normalized_adjacency",
    "embed",
    "preset_fig1",
    "preset_fig2",
    "sample_adjacency",
    "select_dimension",
    "signflip",
]
__version__ = "0.1.0"
