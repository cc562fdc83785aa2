"""
Calibration package
Iterative weight calibration and alpha tuning
"""
