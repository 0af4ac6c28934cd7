"""Acceptance scenarios for the mooncat laboratory."""
