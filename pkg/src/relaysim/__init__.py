"""Simulation toolkit for training-based noncoherent communication over
amplify-and-forward relay networks.

The package covers the coherent distributed space-time block coding chain
(per-relay physical simulation, equivalent destination-side model, pilot
training cycle, linear channel estimation, exhaustive decoders), an OFDM
extension that tolerates per-relay timing offsets, and a Monte-Carlo
engine for codeword-error-rate sweeps driven by the ``relaysim`` command
line tool.
"""

__version__ = "0.1.0"
