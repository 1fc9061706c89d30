"""
Value objects of the brick-work circuit lab: lattices, states, transfer matrices and results.
"""
