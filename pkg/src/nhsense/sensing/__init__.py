"""Steady-state sensing analysis: response, metrics, bath construction and Fisher information."""
