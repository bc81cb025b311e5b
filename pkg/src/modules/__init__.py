"""
tickbound - Quantum Ticking Clock Modules
Simulation of tick waiting times and checks of the accuracy-resolution trade-off

Packages:
- core: operators, states and the vectorized no-tick generator
- engine: clock models and the no-tick evolution
- stats: moments, accuracy, resolution and the trade-off check
- oracles: closed-form exponential, Heaviside and Erlang references
- models: clock builders, the random ensemble and model documents
- trajectories: quantum-jump Monte Carlo sampling
- cli: command implementations behind src/main.py

Version: 0.1.0
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
