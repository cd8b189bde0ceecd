"""Perfect (anti)correlations and the original Bell inequality for two-qubit
and two-qutrit states under spin measurements."""

__version__ = "0.1.0"
