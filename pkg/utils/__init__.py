"""
Utilities package for the SXI++ pipeline
"""
