"""Postnikov diagrams, ice quivers and Louise certificates for positroid varieties."""

__version__ = "0.1.0"
