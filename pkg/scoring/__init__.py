"""
SXI++ scoring core: normalization, bivariate weights, scores, benchmark and remapping
"""
