"""Field-of-view sweeps, replicate aggregation and the fitness/generation analyses."""
