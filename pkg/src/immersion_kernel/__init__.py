"""Edge-deletion to immersion-free graphs: approximation, kernels, exact solving."""

__version__ = "0.1.0"
