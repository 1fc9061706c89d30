"""
Tests for brickdual.
"""
