"""
Logic Module
Propositional CNF formulas, literal weights, weighted-DIMACS I/O and the exact
brute-force oracle.
"""
