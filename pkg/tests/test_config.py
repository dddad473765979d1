import json

import pytest

from celsteer.config import config_from_dict, load_config, parse_quantity
from celsteer.errors import ConfigError
from celsteer.params import TWO_PI, reference_defaults


def test_empty_config_gives_reference_defaults():
    cfg = config_from_dict({})
    assert cfg.params == reference_defaults()
    assert cfg.params.cavity_1.kappa == TWO_PI * 215e3
    assert cfg.params.mirror_1.gamma_m == TWO_PI * 140.0
    assert cfg.params.gain.atomic_decay_gamma == 1.7e6
    units = cfg.params.meta["units"]
    assert units["cavity_1.kappa"] == {"value": 215, "unit": "kHz", "times_two_pi": True}
    assert units["gain.linear_gain_A"]["times_two_pi"] is False
    assert cfg.sweep is None


def test_load_none_and_file(tmp_path):
    assert load_config(None).params == reference_defaults()
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"mirror_2": {"n_th": 7}}))
    assert load_config(path).params.mirror_2.n_th == 7.0


def test_temperature_replaces_default_occupation():
    cfg = config_from_dict({"mirror_1": {"temperature": {"value": 0.7, "unit": "mK"}}})
    m = cfg.params.mirror_1
    assert m.n_th is None
    assert m.occupation == pytest.approx(14.907, abs=1e-3)


def test_bath_spec_ambiguous():
    with pytest.raises(ConfigError, match="mirror_1: n_th and temperature"):
        config_from_dict({"mirror_1": {"n_th": 3, "temperature": {"value": 1, "unit": "K"}}})


@pytest.mark.parametrize("doc, key", [
    ({"cavity_1": {"kappa": 5}}, "cavity_1.kappa"),
    ({"cavity_1": {"kappa": {"value": 1, "unit": "mK"}}}, "cavity_1.kappa.unit"),
    ({"gain": {"omega_over_gamma": "six"}}, "gain.omega_over_gamma"),
    ({"mirror_2": {"spin": 1}}, "mirror_2"),
    ({"gain": {"omega_over_gamma": 2, "drive_strength_Omega": {"value": 1, "unit": "MHz"}}},
     "gain"),
    ({"sweep": {"axis1": {"path": "cavity_1.kappa", "min": 0, "max": 1}}}, "sweep.axis1"),
    ({"sweep": {"axis1": {"path": "n_th", "min": 0, "max": 1, "n_points": 1}}}, "sweep.axis1"),
    ({"mirror_1": {"temperature": {"value": 1, "unit": "K", "times_two_pi": True}}},
     "mirror_1.temperature.times_two_pi"),
    ({"oracle": {"seed": -1}}, "oracle.seed"),
    ({"bogus": {}}, "config"),
])
def test_schema_errors_name_the_key(doc, key):
    with pytest.raises(ConfigError) as err:
        config_from_dict(doc)
    assert str(err.value).startswith(key)


def test_quantity_scaling_is_exact():
    assert parse_quantity("x", {"value": 1.7, "unit": "MHz"}, "rate")[0] == 1.7e6
    assert parse_quantity("x", {"value": 145, "unit": "ng"}, "mass")[0] == 145e-12
    two_pi = parse_quantity("x", {"value": 1, "unit": "Hz", "times_two_pi": True}, "rate")[0]
    assert two_pi == TWO_PI


def test_drive_path_and_sweep_section():
    doc = {
        "cavity_2": {"kappa": {"value": 215, "unit": "kHz", "times_two_pi": True},
                     "drive": {"power": {"value": 1, "unit": "mW"},
                               "drive_frequency_omega_L": {"value": 282, "unit": "THz",
                                                           "times_two_pi": True},
                               "cavity_frequency_nu": {"value": 432, "unit": "THz",
                                                       "times_two_pi": True},
                               "cavity_length_l": {"value": 0.532, "unit": "mm"},
                               "mirror_mass_mu": {"value": 145, "unit": "ng"}}},
        "sweep": {"axis1": {"path": "omega_over_gamma", "min": 0, "max": 12},
                  "axis2": {"path": "n_th", "min": 0, "max": 160},
                  "outputs": ["steering_2to1", "steering_1to2"]},
        "oracle": {"seed": 9, "n_trajectories": 120},
    }
    cfg = config_from_dict(doc)
    c2 = cfg.params.cavity_2
    assert c2.g_over_wm is None and c2.drive.mirror_mass_mu == 145e-12
    assert cfg.sweep.axis1.n_points == 121 and cfg.sweep.axis2.n_points == 161
    assert cfg.sweep.outputs == ("steering_1to2", "steering_2to1")
    assert cfg.oracle == {"seed": 9, "n_trajectories": 120}


def test_one_dimensional_default_resolution():
    cfg = config_from_dict({"sweep": {"axis1": {"path": "omega_over_gamma", "min": 0, "max": 12}}})
    assert cfg.sweep.axis1.n_points == 481
