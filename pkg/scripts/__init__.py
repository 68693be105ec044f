"""Standalone dataset utilities."""
