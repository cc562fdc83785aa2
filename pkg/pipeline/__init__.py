"""
Pipeline package
Configuration, training orchestration, model artifact, scoring, experiments and the CLI router
"""
