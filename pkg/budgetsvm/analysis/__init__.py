"""Diagnostics, reference oracles and verification suites."""
