from unittest.mock import MagicMock, patch

import pytest

from l1rom.cli.main import EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, EXIT_VERIFICATION, build_parser, run
from l1rom.cli.manifest import RunManifest
from l1rom.domain.errors import ConfigError, ConvergenceError, DictionaryFormatError


@pytest.fixture
def mock_command():
    """Fixture for a command that succeeds with an empty manifest"""
    return MagicMock(return_value=RunManifest(command="rom", config={}))


@pytest.fixture
def mock_load():
    with patch("l1rom.cli.main.load_experiment_config") as load:
        load.return_value = MagicMock()
        yield load


def _run(mock_command, argv):
    with patch.dict("l1rom.cli.main.COMMANDS", {"rom": mock_command}):
        return run(argv)


def test_success(mock_load, mock_command):
    assert _run(mock_command, ["rom", "burgers", "--quiet"]) == EXIT_OK
    mock_command.assert_called_once_with(mock_load.return_value)


def test_flags_become_overrides(mock_load, mock_command):
    """Test that command-line flags reach the config loader"""
    _run(mock_command, ["rom", "nozzle", "--seed", "5", "--method", "l2", "--mu", "1.9", "--out", "o", "--quiet"])

    path, overrides = mock_load.call_args[0]
    assert path is None
    assert overrides == {
        "experiment": "nozzle",
        "seed": 5,
        "out": "o",
        "method": "l2",
        "mu": 1.9,
        "threads": None,
    }


@pytest.mark.parametrize(
    "error, code",
    [
        (ConfigError("bad key"), EXIT_CONFIG),
        (DictionaryFormatError("bad header", line=2), EXIT_CONFIG),
        (FileNotFoundError("absent.dict"), EXIT_CONFIG),
        (ConvergenceError("no convergence", 1.0, 200), EXIT_SOLVER),
    ],
)
def test_errors_map_to_exit_codes(mock_load, mock_command, error, code):
    mock_command.side_effect = error

    assert _run(mock_command, ["rom", "burgers", "--quiet"]) == code


def test_failed_checks_exit_with_verification_code(mock_load, mock_command):
    mock_command.return_value = RunManifest(command="verify", config={}, passed=False)

    assert _run(mock_command, ["rom", "burgers", "--quiet"]) == EXIT_VERIFICATION


def test_config_errors_from_loading(mock_load, mock_command):
    mock_load.side_effect = ConfigError("no experiment selected")

    assert _run(mock_command, ["rom", "--quiet"]) == EXIT_CONFIG
    mock_command.assert_not_called()


def test_parser_knows_every_command():
    parser = build_parser()

    for command in ("hdm", "greedy", "rom", "verify", "pod-compare"):
        assert parser.parse_args([command, "burgers"]).command == command


def test_parser_rejects_unknown_experiments():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["rom", "heat"])


def test_undecodable_dictionary_file_exits_with_config_code(tmp_path):
    """Test a corrupted dictionary file end to end through the command line"""
    dictionary_path = tmp_path / "broken.dict"
    dictionary_path.write_bytes(b"L1ROM-DICT v1\n1.0 \xff2.0\n")
    config_path = tmp_path / "rom.env"
    config_path.write_text(
        f"EXPERIMENT = advection\nDICT_FILE = {dictionary_path}\nROM_COMPARE_TRUTH = false\nOUTPUT_DIR = {tmp_path / 'out'}\n"
    )

    assert run(["rom", "--config", str(config_path), "--quiet"]) == EXIT_CONFIG
