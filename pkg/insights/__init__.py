"""
Insights package
Feature adjustment, random forest and decision-path rules
"""
