"""Random-walk edge local times, favorite edges, and their branching-process
representation: simulators, exact oracles, and statistical verification."""

__version__ = "0.1.0"
