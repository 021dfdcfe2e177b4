"""Dictionary-based L1 residual-minimization reduced-order models for 1D hyperbolic PDEs"""

__version__ = "1.0.0"
