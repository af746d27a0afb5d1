"""
Baselines Module
Classical estimators, oracle query accounting and comparison reports.
"""
