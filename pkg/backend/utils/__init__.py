"""
Utility functions - exact polynomials and the error hierarchy
"""
