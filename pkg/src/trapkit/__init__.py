"""Trap spaces and minimal trap spaces of Boolean networks."""
