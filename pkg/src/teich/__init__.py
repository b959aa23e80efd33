"""Whole-surface coordinates, spectra, comparison and distances."""
