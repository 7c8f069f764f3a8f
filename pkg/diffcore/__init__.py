"""Small reverse-mode differentiation engine over numpy arrays."""
from diffcore.errors import AbsaError, CheckpointError, GraphError, ShapeError
from diffcore.gradcheck import GradCheckReport, check_gradients, finite_difference_check
from diffcore.node import DiffNode, backward, constant, find_non_finite, get_dtype, precision, set_precision, variable
from diffcore.optim import AdamState, adam_step, clip_global_norm, global_norm
from diffcore.params import DISCRIMINATOR, FEATURE, PARTITIONS, WORD_PREDICTOR, ParamStore
from diffcore.streams import RandomStreams

__all__ = [
    "AbsaError", "CheckpointError", "GraphError", "ShapeError",
    "GradCheckReport", "check_gradients", "finite_difference_check",
    "DiffNode", "backward", "constant", "find_non_finite", "get_dtype", "precision", "set_precision", "variable",
    "AdamState", "adam_step", "clip_global_norm", "global_norm",
    "DISCRIMINATOR", "FEATURE", "PARTITIONS", "WORD_PREDICTOR", "ParamStore",
    "RandomStreams",
]
