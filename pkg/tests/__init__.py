"""
Test suite for the mooncat laboratory.

Structure:
- tests/unit/           Unit tests (fast, isolated)
- tests/integration/    Command runs writing artifacts
- tests/scenarios/      Acceptance scenarios (mostly slow)

Run all tests:
    pytest

Run specific category:
    pytest -m unit
    pytest -m integration
    pytest -m "scenario and not slow"

Run with coverage:
    pytest --cov=mooncat --cov-report=html
"""
