"""
Results storage package for L96 CLOSURE
"""
