"""Simulation of beamforming computed by a reconfigurable multiport microwave network."""

__version__ = "0.1.0"
