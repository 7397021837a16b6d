"""Generic type systems and finite-control automata, with conversions between them."""

__version__ = "0.1.0"
