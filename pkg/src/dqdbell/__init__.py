"""Exact simulation of Bell-correlation decay for double-quantum-dot qubits in random Coulomb environments."""
__version__ = "0.1.0"
