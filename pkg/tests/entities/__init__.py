"""
Unit tests for entity classes.
"""
