"""
Neural refiner package
Feedforward network, hyperparameter search and refined feature weights
"""
