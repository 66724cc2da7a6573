"""malle-lab: exponents for field counting, Frobenius structure, censuses."""

__version__ = "0.1.0"
