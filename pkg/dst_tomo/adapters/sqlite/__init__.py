"""sqlite3 adapters for NumPy scalars and arrays in stored sweep rows."""

__all__ = [
    "numpy_sqlite",
]
