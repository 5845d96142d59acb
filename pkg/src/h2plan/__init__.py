"""Hydrogen aviation retrofit and sector-coupled energy system planning."""

__version__ = "0.1.0"
