"""Option-file helpers for dst-tomo.

Sweep and simulation defaults can be kept in an INI file (``~/.dst_tomo.cfg``)
so they do not have to be repeated on every command line.
"""

from .config_utils import (
    DEFAULT_CONFIG_PATH,
    read_options,
)

__all__ = [
    "DEFAULT_CONFIG_PATH",
    "read_options",
]
