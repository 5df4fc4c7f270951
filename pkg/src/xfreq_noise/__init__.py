"""Cross-frequency apertures and external noise temperature of linear time-varying antennas."""

__version__ = "0.1.0"
