"""
Linear-response closure package for L96 CLOSURE
"""
