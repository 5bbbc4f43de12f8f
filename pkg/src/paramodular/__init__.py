"""Exact and numerical checks for the Fricke-extended paramodular group of level p
with level-2 structure, and for the weight-one Borcherds product Delta_1."""

__version__ = "0.1.0"
