"""
Abstract contracts between the use cases and their collaborators.
"""
