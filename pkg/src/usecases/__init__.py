"""
Circuit evolution, entanglement oracle, space-time duality, stabilizer engine and harness.
"""
