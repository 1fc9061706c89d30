"""
Tests for the file repositories.
"""
