import pytest

from core.errors import ConfigError
from core.settings import RunConfig, Settings

VARIABLES = ("RANKFORGE_ORDER", "RANKFORGE_PARALLEL", "RANKFORGE_TABLE_MAX", "RANKFORGE_LOG_LEVEL", "RANKFORGE_ASSETS")


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in VARIABLES:
        monkeypatch.delenv(name, raising=False)


def test_defaults():
    settings = Settings.from_env()
    assert settings == Settings(order=None, parallel=4, table_max=100, log_level="WARNING", assets=None)


def test_environment_overrides(monkeypatch, tmp_path):
    monkeypatch.setenv("RANKFORGE_ORDER", "250")
    monkeypatch.setenv("RANKFORGE_PARALLEL", "2")
    monkeypatch.setenv("RANKFORGE_LOG_LEVEL", "info")
    monkeypatch.setenv("RANKFORGE_ASSETS", str(tmp_path))
    settings = Settings.from_env()
    assert (settings.order, settings.parallel, settings.log_level, settings.assets) == (250, 2, "INFO", str(tmp_path))


@pytest.mark.parametrize("name, value", [
    ("RANKFORGE_ORDER", "abc"),
    ("RANKFORGE_PARALLEL", "0"),
    ("RANKFORGE_TABLE_MAX", "-1"),
    ("RANKFORGE_LOG_LEVEL", "LOUD"),
    ("RANKFORGE_ASSETS", "/nonexistent/rankforge"),
])
def test_malformed_values(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ConfigError):
        Settings.from_env()


def test_run_config_validation():
    assert RunConfig(suite="lemmas", order=300).validate().order == 300
    with pytest.raises(ConfigError):
        RunConfig(suite="nosuch").validate()
    with pytest.raises(ConfigError):
        RunConfig(parallel=0).validate()
    with pytest.raises(ConfigError):
        RunConfig(chi="a").validate()
