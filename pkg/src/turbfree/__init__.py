"""Turbulence-free imaging from conventional camera frame stacks.

Reconstructs images with the photon-number fluctuation auto/cross-correlation
algorithm, simulates sunlit scenes seen through turbulence, and scores the
results with SSIM and PSNR.
"""

from ._backend import BACKEND
from .errors import TFIError
from .metrics import CurvePoint, SsimParams, psnr, ssim, sweep
from .reconstruct import (FluctuationPair, PairingMode, QuadTerms, classify, mean_image,
                          normalize_display, quad_terms, reconstruct_color, reconstruct_g2,
                          reference_g2)
from .sim import (IlluminationModel, Placement, SensorModel, SimModel, TurbulenceModel,
                  apply_turbulence, gen_illumination, render_stack, sense)
from .types import Frame, FrameStack, ScalarImage, Scene, frame_to_scalar, validate_stack

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CurvePoint", "FluctuationPair", "Frame", "FrameStack", "IlluminationModel",
    "PairingMode", "Placement", "QuadTerms", "ScalarImage", "Scene", "SensorModel",
    "SimModel", "SsimParams", "TFIError", "TurbulenceModel", "apply_turbulence", "classify",
    "frame_to_scalar", "gen_illumination", "mean_image", "normalize_display", "psnr",
    "quad_terms", "reconstruct_color", "reconstruct_g2", "reference_g2", "render_stack",
    "sense", "ssim", "sweep", "validate_stack",
]
