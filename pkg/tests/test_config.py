import copy
import json
from fractions import Fraction
from importlib import resources

import pytest

from formicode.config import ConfigError, config_from_dict, config_hash, maze_to_dict, _maze_from_dict
from formicode.maze import BinaryTreeMaze, CombMaze


def bundled(name):
    return json.loads((resources.files("formicode") / "configs" / name).read_text())


def test_bundled_three_stage_parses():
    cfg = config_from_dict(bundled("three_stage_30branch.json"))
    assert len(cfg.stages) == 3
    assert cfg.stages[1].goal_distribution.probabilities[20] == Fraction(1, 3)
    assert cfg.stages[1].goal_distribution.probabilities[5] == Fraction(1, 84)
    assert cfg._contexts[2].scheme.anchors == (10, 20)


def test_bundled_rate_config_parses():
    cfg = config_from_dict(bundled("binary_tree_rate.json"))
    assert [cfg.stage_maze(i).depth for i in range(5)] == [2, 3, 4, 5, 6]


def test_seed_override():
    raw = bundled("three_stage_30branch.json")
    assert config_from_dict(raw, seed_override=99).seed == 99


def test_unknown_field_rejected():
    raw = bundled("three_stage_30branch.json")
    raw["colour"] = "red"
    with pytest.raises(ConfigError, match="colour"):
        config_from_dict(raw)
    raw = bundled("three_stage_30branch.json")
    raw["stages"][2]["coding"]["speed"] = 2
    with pytest.raises(ConfigError, match="stage 3"):
        config_from_dict(raw)


def test_bad_probabilities_name_the_stage():
    raw = bundled("three_stage_30branch.json")
    raw["stages"][1]["distribution"] = {"kind": "explicit", "probabilities": {"1": 0.5, "2": 0.4}}
    with pytest.raises(ConfigError, match="stage 2"):
        config_from_dict(raw)


def test_rational_strings():
    raw = bundled("three_stage_30branch.json")
    probs = {str(i): "1/58" for i in range(1, 31) if i != 15}
    probs["15"] = "1/2"
    raw["stages"][1]["distribution"] = {"kind": "explicit", "probabilities": probs}
    cfg = config_from_dict(raw)
    assert cfg._contexts[2].scheme.anchors == (15,)


def test_schema_version_required():
    raw = bundled("three_stage_30branch.json")
    raw["schema_version"] = 2
    with pytest.raises(ConfigError):
        config_from_dict(raw)


def test_maze_round_trip():
    for maze in [BinaryTreeMaze(4), CombMaze("circle", 25), CombMaze("vertical", 40, geometry=(("branch_cm", 18),))]:
        assert _maze_from_dict(maze_to_dict(maze)) == maze


def test_config_hash_is_canonical():
    raw = bundled("three_stage_30branch.json")
    shuffled = json.loads(json.dumps(raw, sort_keys=True))
    assert config_hash(raw) == config_hash(shuffled)
    changed = copy.deepcopy(raw)
    changed["seed"] += 1
    assert config_hash(changed) != config_hash(raw)
