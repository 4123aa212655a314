"""Agreement, diversity and polarization of ordinal elections."""

__version__ = "0.1.0"
