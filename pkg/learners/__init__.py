"""
Feature learners package
Lasso, complement naive Bayes, boosted trees, mutual information and PCA weights
"""
