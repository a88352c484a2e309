import json

import numpy as np
import pytest

from simverify import ConfigError, MapFormatError, ScoringConfig, Thresholds
from simverify.config import parse_mask
from simverify.maps import as_response_map, load_map, loads_csv_grid, loads_json_grid, save_map


def test_json_grid_roundtrip(tmp_path):
    m = np.arange(12.0).reshape(3, 4) / 7
    path = save_map(m, tmp_path / "m.json")
    assert json.loads(path.read_text())["height"] == 3
    assert np.array_equal(load_map(path), m)


def test_csv_grid_roundtrip(tmp_path):
    m = np.random.default_rng(0).normal(size=(5, 2))
    path = save_map(m, tmp_path / "m.csv")
    assert np.array_equal(load_map(path), m)


def test_csv_without_header():
    assert loads_csv_grid("1,2,3\n4,5,6\n").tolist() == [[1, 2, 3], [4, 5, 6]]


@pytest.mark.parametrize(
    "text",
    [
        '{"height": 2, "width": 2, "data": [1, 2, 3]}',
        '{"height": 2, "width": 2}',
        '{"height": 1, "width": 4, "data": [1, 2, 3, 4]}',
        '{"height": 2, "width": 2, "data": [1, 2, 3, NaN]}',
        '{"height": 2, "width": 2, "data": [1, 2, 3, Infinity]}',
        '{"height": 2, "width": 2, "data": [1, 2, 3, "x"]}',
        '{"height": 2.0, "width": 2, "data": [1, 2, 3, 4]}',
        "[1, 2, 3, 4]",
        "not json",
    ],
)
def test_bad_json_grids(text):
    with pytest.raises(MapFormatError):
        loads_json_grid(text)


def test_ragged_csv_rejected():
    with pytest.raises(MapFormatError):
        loads_csv_grid("1,2\n3\n")


def test_missing_file_names_path(tmp_path):
    with pytest.raises(MapFormatError, match="nowhere.json"):
        load_map(tmp_path / "nowhere.json")


def test_as_response_map_flat():
    assert as_response_map([1, 2, 3, 4], 2, 2).shape == (2, 2)
    with pytest.raises(MapFormatError):
        as_response_map([[1.0, 2.0]])


def test_config_defaults():
    cfg = ScoringConfig()
    assert (cfg.rho, cfg.epsilon, cfg.alpha, cfg.delta_min, cfg.tau_c, cfg.kernel_size) == (0.01, 1e-6, 0.8, 0.2, 0.1, 3)
    assert (cfg.connectivity, cfg.quantile_method) == ("eight", "linear_interpolation")


def test_config_file_partial_and_unknown(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text('{"alpha": 0.9, "connectivity": "four"}')
    cfg = ScoringConfig.from_json(p)
    assert cfg.alpha == 0.9 and cfg.connectivity == "four" and cfg.rho == 0.01
    p.write_text('{"alpha": 0.9, "gamma": 1}')
    with pytest.raises(ConfigError, match="gamma"):
        ScoringConfig.from_json(p)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"rho": 0.0},
        {"rho": 1.5},
        {"epsilon": 0.0},
        {"alpha": 1.0},
        {"tau_c": 0.0},
        {"kernel_size": 2},
        {"kernel_size": 0},
        {"delta_min": -0.1},
        {"connectivity": "six"},
        {"quantile_method": "midpoint"},
    ],
)
def test_config_invariants(kwargs):
    with pytest.raises(ConfigError):
        ScoringConfig(**kwargs)


def test_thresholds_parse_and_defaults():
    assert Thresholds().as_tuple() == (0.475, 0.4, 0.7)
    assert Thresholds.parse("0.5, 0.3,0.9").as_tuple() == (0.5, 0.3, 0.9)
    for bad in ("0.5,0.3", "a,b,c", "0.5,0.3,1.5"):
        with pytest.raises(ConfigError):
            Thresholds.parse(bad)


def test_parse_mask():
    assert parse_mask(None) == {"S", "C", "P"}
    assert parse_mask("sp") == {"S", "P"}
    with pytest.raises(ConfigError):
        parse_mask("sx")
