"""
Tests for the numerics substrate.
"""
