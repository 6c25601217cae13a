"""Numerics for a leaky quantum wire with point-interaction dots: spectra,
resonance poles, decay laws, and Zeno dynamics."""

__version__ = "0.1.0"

from .model import (ConfigError, DotSite, ModelConfig, QuadratureSpec,
                    config_from_dict, detect_mirror_symmetry, parse_config,
                    validate_model)

__all__ = [
    "__version__", "ConfigError", "DotSite", "ModelConfig", "QuadratureSpec",
    "config_from_dict", "detect_mirror_symmetry", "parse_config",
    "validate_model",
]
