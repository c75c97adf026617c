"""Synthetic qubit readout data, IQ-plane state discriminators and their benchmark."""

__version__ = "0.1.0"
