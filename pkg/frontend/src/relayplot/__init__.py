"""Plotting companion for relaysim sweep results.

Reads one or more result CSVs (the ``relaysim`` output format), renders
semilog codeword-error-rate versus SNR comparison figures and measures dB
gaps between curves at a target error rate.
"""

__version__ = "0.1.0"
