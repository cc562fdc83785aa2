"""
Tabular data module: loading, cleaning, splitting and synthetic cohorts
"""
