import logging

import pytest

from dst_tomo.config import read_options
from dst_tomo.errors import InvalidConfig


def write_config(tmp_path, text):
    path = tmp_path / "dst.cfg"
    path.write_text(text)
    return str(path)


def test_reads_the_named_section(tmp_path):
    path = write_config(
        tmp_path,
        "[defaults]\nsamples = 10\n\n[sweep]\nsamples = 2000\nseed = 7\ngrid = 0:0.9:10\nensemble = bures\n",
    )
    assert read_options(section="sweep", config_path=path) == {
        "samples": 2000,
        "seed": 7,
        "grid": "0:0.9:10",
        "ensemble": "bures",
    }


def test_falls_back_to_defaults(tmp_path, caplog):
    path = write_config(tmp_path, "[defaults]\nshots = 500\nruns = 20\n")
    with caplog.at_level(logging.WARNING, logger="dst_tomo.config"):
        assert read_options(section="simulate", config_path=path) == {"shots": 500, "runs": 20}
    assert "No [simulate] section" in caplog.text


def test_falls_back_to_any_section(tmp_path):
    path = write_config(tmp_path, "[other]\nworkers = 4\n")
    assert read_options(section="sweep", config_path=path) == {"workers": 4}


def test_unknown_options_are_ignored_with_a_warning(tmp_path, caplog):
    path = write_config(tmp_path, "[sweep]\nsamples = 5\ncolour = blue\nseed =\n")
    with caplog.at_level(logging.WARNING, logger="dst_tomo.config"):
        assert read_options(section="sweep", config_path=path) == {"samples": 5}
    assert "colour" in caplog.text


def test_bad_values_are_rejected(tmp_path):
    path = write_config(tmp_path, "[sweep]\nsamples = many\n")
    with pytest.raises(InvalidConfig):
        read_options(section="sweep", config_path=path)


def test_explicit_file_must_exist(tmp_path):
    with pytest.raises(InvalidConfig):
        read_options(section="sweep", config_path=str(tmp_path / "missing.cfg"))


def test_unparseable_file(tmp_path):
    path = write_config(tmp_path, "samples = 5\n")
    with pytest.raises(InvalidConfig):
        read_options(section="sweep", config_path=path)


def test_missing_default_file_gives_no_options(tmp_path, monkeypatch):
    monkeypatch.setenv("HOME", str(tmp_path))
    assert read_options(section="sweep") == {}


def test_default_file_in_home(tmp_path, monkeypatch):
    monkeypatch.setenv("HOME", str(tmp_path))
    (tmp_path / ".dst_tomo.cfg").write_text("[defaults]\nseed = 3\n")
    assert read_options(section="sweep") == {"seed": 3}
