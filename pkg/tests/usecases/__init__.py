"""
Tests for the pipelines and the harness.
"""
