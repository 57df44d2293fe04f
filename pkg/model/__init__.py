"""
Two-scale Lorenz 96 model package for L96 CLOSURE
"""
