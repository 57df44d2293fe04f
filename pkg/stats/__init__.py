"""
Statistical diagnostics package for L96 CLOSURE
"""
