"""Exact perturbative computations for RSOS face models, quantum affine
sl2 intertwiners and impurity operators."""

__version__ = "0.1.0"
