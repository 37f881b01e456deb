"""Scene text recognition by iterative denoising of a fixed-length token sequence."""

from .config import RunConfig, load_config, load_profile
from .diffusion import DenoiserOutput, corrupt, posterior_probs, reverse_step, sample
from .model import DecoderConfig, DiffusionSTR, VisionConfig
from .schedule import NoiseSchedule, build_schedule
from .train import TrainConfig, fit, lr_at
from .vocab import Charset, Vocabulary, decode_tokens, encode_label, presence_targets

__all__ = [
    "Charset", "DecoderConfig", "DenoiserOutput", "DiffusionSTR", "NoiseSchedule", "RunConfig",
    "TrainConfig", "VisionConfig", "Vocabulary", "build_schedule", "corrupt", "decode_tokens",
    "encode_label", "fit", "load_config", "load_profile", "lr_at", "posterior_probs",
    "presence_targets", "reverse_step", "sample",
]

__version__ = "0.1.0"
