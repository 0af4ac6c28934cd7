"""Unit tests for mooncat modules."""
