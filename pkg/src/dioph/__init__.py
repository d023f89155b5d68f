"""Computational laboratory for quantitative metric Diophantine approximation.

Subpackages: ``cf_core`` (continued fractions and cylinders), ``extremal_fourier``
(Beurling-Selberg pairs), ``counting_lab`` (counting experiments),
``kaufman_measure`` (Cantor-set measure and its Fourier transform),
``oscillatory`` (certified oscillatory-integral bounds) and ``experiments`` /
``cli`` (configured runs).
"""

from . import cf_core, counting_lab, errors, extremal_fourier, kaufman_measure, oscillatory
from .config import ExperimentConfig
from .experiments import COMMANDS, run_command

__version__ = "0.1.0"

__all__ = ["cf_core", "counting_lab", "errors", "extremal_fourier", "kaufman_measure", "oscillatory",
           "ExperimentConfig", "COMMANDS", "run_command", "__version__"]
