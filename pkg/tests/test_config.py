import pytest

from toric_fsig.config import LOG_LEVEL_ENV_VAR, WORKERS_ENV_VAR, Settings, get_settings
from toric_fsig.exceptions import ConfigurationError


class TestGetSettings:
    def test_defaults(self):
        assert get_settings({}) == Settings(workers=1, log_level="WARNING")

    def test_reads_the_environment(self):
        settings = get_settings({WORKERS_ENV_VAR: "4", LOG_LEVEL_ENV_VAR: "debug"})

        assert settings.workers == 4
        assert settings.log_level == "DEBUG"

    def test_empty_values_fall_back_to_defaults(self):
        assert get_settings({WORKERS_ENV_VAR: "", LOG_LEVEL_ENV_VAR: ""}) == Settings()

    def test_defaults_to_os_environ(self, monkeypatch):
        monkeypatch.setenv(WORKERS_ENV_VAR, "3")

        assert get_settings().workers == 3

    @pytest.mark.parametrize(
        "environ",
        [
            {WORKERS_ENV_VAR: "0"},
            {WORKERS_ENV_VAR: "many"},
            {LOG_LEVEL_ENV_VAR: "chatty"},
        ],
    )
    def test_rejects_unusable_values(self, environ):
        with pytest.raises(ConfigurationError, match="TORIC_FSIG"):
            get_settings(environ)
