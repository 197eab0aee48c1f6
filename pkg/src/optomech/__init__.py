"""Linearised quantum-Langevin model of a cavity optomechanical system.

The submodules are layered: ``params`` and ``numerics`` at the bottom,
then ``oscillator_markov`` and ``bath_spectrum`` for the lone oscillator,
``optomech_linear`` and ``pole_analysis`` for the driven system, and
``fluctuation_spectra``, ``energy_cooling`` and ``detection`` on top.
"""

from .bath_spectrum import FlatOccupation, OhmicMatchedOccupation, TabulatedOccupation
from .errors import OptomechError
from .optomech_linear import OperatingPoint, operating_point, self_consistent_detuning
from .params import SystemParams, preset_p0
from .pole_analysis import PoleSet

__all__ = [
    "FlatOccupation",
    "OhmicMatchedOccupation",
    "OperatingPoint",
    "OptomechError",
    "PoleSet",
    "SystemParams",
    "TabulatedOccupation",
    "operating_point",
    "preset_p0",
    "self_consistent_detuning",
]

__version__ = "0.1.0"
