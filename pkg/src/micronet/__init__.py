"""Pure-numpy layers, networks and optimizer."""

from src.micronet.base import Network, build_network
from src.micronet.blstm import CnnBlstmNetwork, blstm_forward
from src.micronet.cnn import CnnNetwork, cnn_forward, cnn_frames_forward, mean_frames
from src.micronet.gradcheck import GradCheckResult, grad_check
from src.micronet.optim import AdamState, adam_step

__all__ = [
    "Network",
    "build_network",
    "CnnNetwork",
    "CnnBlstmNetwork",
    "cnn_forward",
    "cnn_frames_forward",
    "blstm_forward",
    "mean_frames",
    "grad_check",
    "GradCheckResult",
    "AdamState",
    "adam_step",
]
