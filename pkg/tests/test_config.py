import pytest

from murmur.config import Config, load_config, parse_config_file
from murmur.errors import DomainError, ParseError


def test_defaults():
    cfg = load_config(env={})
    assert cfg == Config()
    assert cfg.bsgs_cutoff == 2**14 and cfg.threads == 1 and cfg.cache is None


def test_precedence(tmp_path):
    path = tmp_path / "murmur.conf"
    path.write_text("# comment\nthreads = 3\ncache = /tmp/from-file.csv\nbsgs-cutoff = 100  # inline\n")
    assert load_config(path, env={}).threads == 3
    cfg = load_config(path, env={"MURMUR_THREADS": "5", "MURMUR_CACHE": "/tmp/env.csv"})
    assert (cfg.threads, cfg.cache, cfg.bsgs_cutoff) == (5, "/tmp/env.csv", 100)
    cfg = load_config(path, env={"MURMUR_THREADS": "5"}, threads=2, cache=None)
    assert cfg.threads == 2 and cfg.cache == "/tmp/from-file.csv"


def test_parse_errors(tmp_path):
    path = tmp_path / "bad.conf"
    path.write_text("colour = blue\n")
    with pytest.raises(ParseError, match=":1:"):
        parse_config_file(path)
    path.write_text("threads = many\n")
    with pytest.raises(ParseError):
        parse_config_file(path)
    with pytest.raises(ParseError):
        parse_config_file(tmp_path / "missing.conf")


@pytest.mark.parametrize(
    "kw", [{"threads": 0}, {"bsgs_cutoff": 3}, {"bad_prime_policy": "ignore"}, {"clamp_policy": "drop"}]
)
def test_validation(kw):
    with pytest.raises(DomainError):
        load_config(env={}, **kw)
