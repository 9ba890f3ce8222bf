from .common import ExperimentReport, RegimeReport
from .denoise import DenoiseConfig, run_denoise, synthetic_image
from .ionosphere import IonosphereConfig, run_ionosphere
from .polydemo import PolyDemoConfig, run_polydemo
from .shm import ShmConfig, run_shm, shm_generate

__all__ = [
    "DenoiseConfig",
    "ExperimentReport",
    "IonosphereConfig",
    "PolyDemoConfig",
    "RegimeReport",
    "ShmConfig",
    "run_denoise",
    "run_ionosphere",
    "run_polydemo",
    "run_shm",
    "shm_generate",
    "synthetic_image",
]
