"""
Regime experiments package for L96 CLOSURE
"""
