"""
Utility functions for the block IVP solver
"""
