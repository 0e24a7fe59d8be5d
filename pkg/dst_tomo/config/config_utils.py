#!/usr/bin/env python

"""Utility helpers for reading dst-tomo option files."""

from __future__ import annotations

import logging
from configparser import ConfigParser, Error as ConfigParserError
from os.path import expanduser
from pathlib import Path
from typing import Optional

from ..errors import InvalidConfig

logger = logging.getLogger("dst_tomo.config")

DEFAULT_CONFIG_PATH = "~/.dst_tomo.cfg"
DEFAULT_SECTION = "defaults"

OPTION_TYPES = {
    "samples": int,
    "seed": int,
    "grid": str,
    "ensemble": str,
    "workers": int,
    "database": str,
    "svg": str,
    "shots": int,
    "runs": int,
}


def read_options(
    *,
    section: Optional[str] = None,
    config_path: Optional[str] = None,
) -> dict[str, object]:
    """Return the recognised options found in a dst-tomo option file.

    Parameters
    ----------
    section:
        Section to read, usually the subcommand name (``sweep``, ``simulate``).
        If the file has no such section the lookup falls back to ``defaults``
        and then to any other section; the first one holding a recognised
        option wins.
    config_path:
        Path of the option file. ``None`` reads ``~/.dst_tomo.cfg`` if it
        exists; an explicitly named file must exist.

    Returns
    -------
    dict
        Option name to value, converted to ``int`` where the option is numeric.

    Raises
    ------
    InvalidConfig
        If an explicit file is missing or unreadable, or a value does not convert.
    """

    explicit = config_path is not None
    path = config_path if explicit else DEFAULT_CONFIG_PATH
    parser = _load_config_parser(path, required=explicit)
    if parser is None:
        return {}

    for section_name in _candidate_sections(parser, section):
        options = parser[section_name]
        extracted: dict[str, object] = {}

        for key, value in options.items():
            if key not in OPTION_TYPES:
                logger.warning(f"Ignoring unknown option '{key}' in section [{section_name}] of {path}")
                continue
            if value is None or value.strip() == "":
                continue
            try:
                extracted[key] = OPTION_TYPES[key](value.strip())
            except ValueError as e:
                raise InvalidConfig(
                    f"Option '{key}' in section [{section_name}] of {path} must be "
                    f"{'an integer' if OPTION_TYPES[key] is int else 'text'}; found '{value}'."
                ) from e

        if extracted:
            if section and section_name != section:
                logger.warning(f"No [{section}] section in {path}; using [{section_name}]")
            logger.info(f"Read {len(extracted)} option(s) from [{section_name}] in {path}")
            return extracted

    return {}


def _load_config_parser(config_path: str, required: bool = False) -> Optional[ConfigParser]:
    path = Path(expanduser(config_path))
    if not path.exists():
        if required:
            raise InvalidConfig(f"Option file '{config_path}' does not exist.")
        return None

    parser = ConfigParser(interpolation=None)
    try:
        with path.open() as handle:
            parser.read_file(handle)
    except (OSError, ConfigParserError) as e:
        if required:
            raise InvalidConfig(f"Could not read option file '{config_path}': {e}") from e
        logger.warning(f"Skipping unreadable option file {config_path}: {e}")
        return None

    return parser


def _candidate_sections(parser: ConfigParser, section: Optional[str]) -> list[str]:
    if section:
        if parser.has_section(section):
            return [section]
        # Fall back to the default lookup order if the explicit section does not exist.

    seen = set()
    ordered = []
    if parser.has_section(DEFAULT_SECTION):
        ordered.append(DEFAULT_SECTION)
        seen.add(DEFAULT_SECTION)
    for name in parser.sections():
        if name not in seen:
            ordered.append(name)
    return ordered
