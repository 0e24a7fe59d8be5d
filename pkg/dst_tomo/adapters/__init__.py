"""
Database adapters for values produced by dst-tomo.

NumPy scalars coming out of the Monte-Carlo reductions are not understood by
the ``sqlite3`` driver; :mod:`dst_tomo.adapters.sqlite.numpy_sqlite` registers
conversions for them. It is loaded automatically by ``ResultsDatabase`` for
``sqlite://`` URLs.
"""

__all__ = [
    # Submodules
    "sqlite",
]
