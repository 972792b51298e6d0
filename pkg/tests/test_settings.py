"""
Unit tests for settings.py .env parsing and typed settings.
"""
import sys
from pathlib import Path

import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))
import settings


SCRIPT_DIR = Path("/repo")


def test_load_env_file_skips_comments_and_last_wins(tmp_path):
    env = tmp_path / ".env"
    env.write_text("# MAX_CROSSINGS=3\nMAX_CROSSINGS=6\nMAX_CROSSINGS=9\n\n# prose line\nDEFAULT_SEED=4\n")
    assert settings.load_env_file(env) == {"MAX_CROSSINGS": "9", "DEFAULT_SEED": "4"}


def test_load_env_file_strips_spaces_and_inline_comments(tmp_path):
    env = tmp_path / ".env"
    env.write_text("RANDOM_TRIALS = 5   # quick\nGCD_TERM_BOUND=40\n")
    assert settings.load_env_file(env) == {"RANDOM_TRIALS": "5", "GCD_TERM_BOUND": "40"}


def test_env_example_loads_to_defaults():
    example = Path(__file__).parent.parent / ".env.example"
    assert settings.load_settings(settings.load_env_file(example)) == settings.Settings()


def test_load_env_file_missing_is_empty(tmp_path):
    assert settings.load_env_file(tmp_path / "absent.env") == {}


def test_explicit_config_path_is_used(tmp_path):
    assert settings.resolve_env_path(SCRIPT_DIR, str(tmp_path / "x.env")) == tmp_path / "x.env"


def test_config_path_expands_user():
    assert settings.resolve_env_path(SCRIPT_DIR, "~/skein.env") == Path("~/skein.env").expanduser()


def test_default_config_is_script_local():
    assert settings.resolve_env_path(SCRIPT_DIR, None) == SCRIPT_DIR / ".env"


def test_defaults_when_unset():
    s = settings.load_settings({})
    assert (s.MAX_CROSSINGS, s.GCD_TERM_BOUND, s.DEFAULT_SEED, s.RANDOM_TRIALS) == (12, 40, 0, 20)


def test_values_are_typed_and_unknown_keys_ignored():
    s = settings.load_settings({"MAX_CROSSINGS": "8", "RANDOM_TRIALS": "", "UNKNOWN_KEY": "x"})
    assert s.MAX_CROSSINGS == 8
    assert s.RANDOM_TRIALS == 20


def test_non_integer_value_names_the_key():
    with pytest.raises(ValueError) as exc:
        settings.load_settings({"GCD_TERM_BOUND": "lots"})
    assert "GCD_TERM_BOUND" in str(exc.value)


def test_negative_value_is_rejected():
    with pytest.raises(ValueError, match="must not be negative"):
        settings.load_settings({"DEFAULT_SEED": "-1"})
