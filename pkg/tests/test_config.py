import pytest

from geckosim.config import (
    ConfigError,
    ScenarioConfig,
    apply_overrides,
    config_from_dict,
    config_to_dict,
    load_config,
)


def test_defaults_load_without_file():
    cfg = load_config(None)
    assert cfg.tick_ms == 50
    assert cfg.gripper.grasp_delay_ms == 250
    assert cfg.adhesion.quality == pytest.approx(0.27)


def test_yaml_file_overrides(tmp_path):
    path = tmp_path / "s.yaml"
    path.write_text("seed: 9\ncontrol:\n  kp: 0.7\n")
    cfg = load_config(str(path))
    assert cfg.seed == 9
    assert cfg.control.kp == pytest.approx(0.7)
    assert cfg.control.kd == pytest.approx(2.5)  # untouched default


def test_empty_yaml_is_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("")
    assert load_config(str(path)) == ScenarioConfig()


def test_unknown_top_level_key():
    with pytest.raises(ConfigError, match="bogus"):
        config_from_dict({"bogus": 1})


def test_unknown_nested_key_reports_path():
    with pytest.raises(ConfigError, match="control.kq"):
        config_from_dict({"control": {"kq": 0.5}})


def test_type_error_reports_path():
    with pytest.raises(ConfigError, match="tick_ms"):
        config_from_dict({"tick_ms": "fast"})


def test_bool_not_accepted_as_number():
    with pytest.raises(ConfigError):
        config_from_dict({"duration_s": True})


def test_roundtrip_dict():
    cfg = ScenarioConfig(seed=4)
    assert config_from_dict(config_to_dict(cfg)) == cfg


class TestOverrides:
    def test_dotted_override(self):
        cfg = apply_overrides(ScenarioConfig(), ["control.kp=0.9", "seed=3"])
        assert cfg.control.kp == pytest.approx(0.9)
        assert cfg.seed == 3

    def test_unknown_override_key(self):
        with pytest.raises(ConfigError, match="control.zz"):
            apply_overrides(ScenarioConfig(), ["control.zz=1"])

    def test_missing_equals(self):
        with pytest.raises(ConfigError):
            apply_overrides(ScenarioConfig(), ["control.kp"])

    def test_wrong_type_still_validated(self):
        with pytest.raises(ConfigError, match="seed"):
            apply_overrides(ScenarioConfig(), ["seed=soon"])

    def test_bool_override(self):
        cfg = apply_overrides(ScenarioConfig(), ["gripper.auto=false"])
        assert cfg.gripper.auto is False
