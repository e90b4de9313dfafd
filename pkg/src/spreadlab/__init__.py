"""Desarguesian spreads, Segre varieties and subgeometry closures over finite fields."""

__version__ = "0.1.0"
