"""
Tests for configuration and wiring.
"""
