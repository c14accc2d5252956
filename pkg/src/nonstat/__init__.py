"""Spectral test of nonstationarity against long-memory stationarity."""
