"""Linear-profile vortex dynamics in a rotating compressible medium.

Submodules: ``model`` (state, right-hand sides, first integrals),
``integrate``, ``linstab``, ``normalform``, ``resonance``, ``oracles``
(closed-form solutions), ``pde`` (finite-difference solver),
``acceptance`` and ``cli``.
"""

from .integrate import integrate
from .model import Equilibrium, FlowState, ModelParams, ParameterError, equilibrium

__version__ = "0.1.0"

__all__ = ["Equilibrium", "FlowState", "ModelParams", "ParameterError", "equilibrium", "integrate", "__version__"]
