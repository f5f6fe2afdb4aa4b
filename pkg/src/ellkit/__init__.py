"""A proof kernel for second-order elementary linear logic, with
certified extraction of elementary-time programs."""

__version__ = "0.1.0"
