"""
Numerics substrate, file repositories and the command-line interface.
"""
