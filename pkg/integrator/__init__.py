"""
Fixed-step integration package for L96 CLOSURE
"""
