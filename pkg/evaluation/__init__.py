"""
Evaluation package
Classification metrics, ROC/AUC and bootstrap intervals
"""
