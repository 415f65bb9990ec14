"""
Monte Carlo oracle package.

This package provides independent checks of the budget engine: a pulse-stream
simulator for the detection statistics and per-photon-number series for the
multi-photon leakage closed forms.
"""
