"""Integration tests for the mooncat command line."""
