"""CSV/JSON exports of histories, analyses, genomes and trajectories."""
