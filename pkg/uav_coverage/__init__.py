"""Downlink SINR coverage of conventional and IRS-assisted UAV networks."""

__version__ = "0.1.0"
