"""Spherical Aluthge transforms of commuting matrix tuples and their Taylor spectra."""
