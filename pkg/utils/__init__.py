"""
Utilities package for L96 CLOSURE
"""
