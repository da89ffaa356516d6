"""Exact series toolkit for chi_10, the Hilbert-scheme Fock space operators E^(r) and K3 x E curve counts."""

__version__ = "0.1.0"

from .series import HalfLaurent, SeriesError, TruncSeries, UnknownCoefficient  # noqa: E402

__all__ = ["HalfLaurent", "SeriesError", "TruncSeries", "UnknownCoefficient", "__version__"]
