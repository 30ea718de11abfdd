"""Closed-loop fitness evaluation and the generational genetic algorithm."""
