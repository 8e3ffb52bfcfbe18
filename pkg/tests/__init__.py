"""Tests for budgetsvm."""
