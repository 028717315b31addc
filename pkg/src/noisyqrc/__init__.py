"""Noisy quantum reservoir computing: Kraus noise channels, G3 reservoirs,
Pauli-space analysis and a ridge-regression readout."""

__version__ = "0.1.0"
