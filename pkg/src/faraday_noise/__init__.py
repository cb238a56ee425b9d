"""Faraday-interface noise coefficients and quantum-memory fidelity for alkali atoms."""
__version__ = "0.1.0"
