"""
Algorithms Module
Quantum search, weighted constrained sampling, weighted model counting and
the repeat-and-vote MPE/MAP wrapper.
"""
