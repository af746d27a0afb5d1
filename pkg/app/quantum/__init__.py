"""
Quantum Simulation Module
Dense state vectors, gate gadgets, power backends and phase estimation.
"""
