"""
Tests for the infrastructure layer.
"""
