import pytest

from potentials.application.exceptions.base import InvalidSettingError
from potentials.bootstrap.configs import load_settings


class TestLoadSettings:
    """POTENTIALS_* environment variables"""

    def test_defaults(self) -> None:
        config = load_settings({})
        assert config.engine.enumeration_cap == 10
        assert config.engine.enumeration_budget == 200_000
        assert config.engine.minor_sum_cap == 14
        assert config.engine.workers == 1
        assert config.dumps.forest_path is None
        assert config.dumps.trajectory_path is None
        assert config.dumps.trajectory_cap == 100
        assert config.log_level == "INFO"

    def test_overrides(self) -> None:
        config = load_settings(
            {
                "POTENTIALS_ENUMERATION_CAP": "7",
                "POTENTIALS_WORKERS": "4",
                "POTENTIALS_FOREST_DUMP": "/tmp/forests.jsonl",
                "POTENTIALS_TRAJECTORY_DUMP_CAP": "0",
                "POTENTIALS_LOG_LEVEL": "debug",
            },
        )
        assert config.engine.enumeration_cap == 7
        assert config.engine.workers == 4
        assert config.dumps.forest_path == "/tmp/forests.jsonl"
        assert config.dumps.trajectory_cap == 0
        assert config.log_level == "DEBUG"

    def test_empty_dump_path_disables_dump(self) -> None:
        assert load_settings({"POTENTIALS_TRAJECTORY_DUMP": ""}).dumps.trajectory_path is None

    @pytest.mark.parametrize(
        ("name", "value"),
        [
            ("POTENTIALS_ENUMERATION_CAP", "1"),
            ("POTENTIALS_ENUMERATION_CAP", "ten"),
            ("POTENTIALS_WORKERS", "0"),
            ("POTENTIALS_MINOR_SUM_CAP", "-1"),
            ("POTENTIALS_LOG_LEVEL", "verbose"),
        ],
    )
    def test_invalid(self, name: str, value: str) -> None:
        with pytest.raises(InvalidSettingError) as info:
            load_settings({name: value})
        assert info.value.name == name
