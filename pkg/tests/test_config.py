import json

import pytest

from config import Settings, deep_merge, default_run_config, parse_value_list, resolve_run_config
from core.enums import PredictorName, ReportFormat, SamplingMode
from core.exceptions import ConfigError


def test_parse_value_list():
    assert parse_value_list("0.5, 0.75,0.9") == [0.5, 0.75, 0.9]
    assert parse_value_list("0.3:0.9:0.1") == [0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
    assert parse_value_list("0.5:0.95:0.05")[-1] == 0.95
    with pytest.raises(ValueError):
        parse_value_list("0.1:0.9")
    with pytest.raises(ValueError):
        parse_value_list("0.1:0.9:0")


def test_deep_merge_skips_none():
    base = {"ais": {"center_threshold": 0.5, "smoothing_sigma": 1.6}, "jobs": 4}
    merged = deep_merge(base, {"ais": {"center_threshold": 0.4, "smoothing_sigma": None}, "jobs": None})
    assert merged == {"ais": {"center_threshold": 0.4, "smoothing_sigma": 1.6}, "jobs": 4}
    assert base["ais"]["center_threshold"] == 0.5


def test_defaults_come_from_settings():
    source = Settings(AIS_CENTER_THRESHOLD=0.45, EVAL_THRESHOLDS="0.5,0.75", JOBS=3)
    defaults = default_run_config("segment", source)
    assert defaults["ais"]["center_threshold"] == 0.45
    assert defaults["thresholds"] == [0.5, 0.75]
    assert defaults["jobs"] == 3
    assert defaults["center_grid"] == [0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]


def test_bad_settings_list_is_a_config_error():
    with pytest.raises(ConfigError):
        default_run_config("segment", Settings(GRID_VALUES="0.3:0.9"))


def test_resolve_defaults():
    config = resolve_run_config("interactive")
    assert config.command == "interactive"
    assert config.interactive.n_corrections == 7
    assert config.predictor.name == PredictorName.ORACLE
    assert config.report_format == ReportFormat.CSV
    assert config.jobs >= 1


def test_flags_override_config_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({
        "command": "ignored",
        "ais": {"center_threshold": 0.4, "boundary_threshold": 0.7},
        "interactive": {"sampling": "random"},
        "seed": 5,
    }))
    config = resolve_run_config("segment", {"ais": {"center_threshold": 0.35}}, path)
    assert config.command == "segment"
    assert config.ais.center_threshold == 0.35
    assert config.ais.boundary_threshold == 0.7
    assert config.interactive.sampling == SamplingMode.RANDOM
    assert config.interactive.seed == 5
    assert config.paths.config == str(path)


def test_saved_run_config_is_accepted(tmp_path):
    first = resolve_run_config("evaluate", {"thresholds": [0.5, 0.6], "jobs": 2})
    path = tmp_path / "run_config.json"
    path.write_text(first.model_dump_json())
    again = resolve_run_config("evaluate", config_path=path)
    assert again.thresholds == [0.5, 0.6]
    assert again.jobs == 2


@pytest.mark.parametrize("overrides", [
    {"thresholds": [0.5, 1.2]},
    {"thresholds": [0.3]},
    {"center_grid": [0.0, 0.5]},
    {"ais": {"center_threshold": 1.5}},
    {"jobs": 0},
    {"wsi": {"halo": -1}},
    {"predictor": {"name": "sam"}},
    {"report_format": "xml"},
])
def test_invalid_values_are_config_errors(overrides):
    with pytest.raises(ConfigError):
        resolve_run_config("segment", overrides)


def test_field_is_reported():
    with pytest.raises(ConfigError) as info:
        resolve_run_config("segment", {"ais": {"smoothing_sigma": -1}})
    assert info.value.field == "ais.smoothing_sigma"


def test_unknown_keys_are_rejected(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"colour": "blue"}))
    with pytest.raises(ConfigError):
        resolve_run_config("segment", config_path=path)


def test_unreadable_config_file(tmp_path):
    with pytest.raises(ConfigError):
        resolve_run_config("segment", config_path=tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigError):
        resolve_run_config("segment", config_path=broken)
    listed = tmp_path / "list.json"
    listed.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        resolve_run_config("segment", config_path=listed)
