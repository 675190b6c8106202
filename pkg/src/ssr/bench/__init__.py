"""Benchmark harness: datasets, perturbation, pipeline runs and statistics."""
