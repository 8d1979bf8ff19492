"""Secure repair of linear secret sharing schemes without a trusted dealer."""
__version__ = "0.1.0"
