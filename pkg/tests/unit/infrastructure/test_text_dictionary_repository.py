import numpy as np
import pytest

from l1rom.domain.entities.dictionary import Dictionary
from l1rom.domain.entities.grid import Grid1D, GridField, Trajectory
from l1rom.domain.errors import DictionaryFormatError
from l1rom.infrastructure.repositories.text_dictionary_repository import TextDictionaryRepository


@pytest.fixture
def repository():
    return TextDictionaryRepository()


@pytest.fixture
def sample_dictionary(rng):
    """Fixture for a two-member, two-component dictionary with awkward floats"""
    grid = Grid1D(x_min=0.0, x_max=2.0 * np.pi, n_cells=5, periodic=True)
    times = [0.0, 0.1, 1.0 / 3.0]
    entries = []
    for mu in (0.1, 0.7):
        states = [GridField(grid=grid, n_components=2, values=rng.standard_normal(10) * 1e-7 + mu) for _ in times]
        entries.append(Trajectory(mu=(mu,), times=times, states=states, scheme_id="fv-godunov-burgers"))
    return Dictionary(entries=entries, seed=4)


@pytest.fixture
def saved_path(repository, sample_dictionary, tmp_path):
    path = str(tmp_path / "sample.dict")
    repository.save(sample_dictionary, path)
    return path


def _rewrite(path, edit):
    with open(path, "r", encoding="ascii") as handle:
        lines = handle.read().splitlines()
    lines = edit(lines)
    with open(path, "w", encoding="ascii") as handle:
        handle.write("\n".join(lines) + "\n")


def test_round_trip_is_bit_exact(repository, sample_dictionary, saved_path):
    """Test that every stored value parses back to the same double"""
    loaded = repository.load(saved_path, seed=4)

    assert loaded.mus == sample_dictionary.mus
    assert loaded.grid == sample_dictionary.grid
    assert loaded.seed == 4
    np.testing.assert_array_equal(loaded.time_grid, sample_dictionary.time_grid)
    for original, restored in zip(sample_dictionary.entries, loaded.entries):
        for a, b in zip(original.states, restored.states):
            np.testing.assert_array_equal(a.values, b.values)


def test_header_lines(saved_path):
    """Test the version line and the size header"""
    with open(saved_path, "r", encoding="ascii") as handle:
        lines = handle.read().splitlines()

    assert lines[0] == "L1ROM-DICT v1"
    assert lines[1].startswith("N 5 P 2 K 2 T 3 PERIODIC 1 XMIN 0.0 XMAX ")
    assert lines[3] == "MU 0.1"


def test_save_creates_parent_directories(repository, sample_dictionary, tmp_path):
    path = tmp_path / "nested" / "out.dict"

    repository.save(sample_dictionary, str(path))

    assert path.exists()


def test_version_mismatch(repository, saved_path):
    """Test that another format version is refused at line 1"""
    _rewrite(saved_path, lambda lines: ["L1ROM-DICT v2"] + lines[1:])

    with pytest.raises(DictionaryFormatError) as excinfo:
        repository.load(saved_path)

    assert excinfo.value.line == 1
    assert "v2" in str(excinfo.value)


def test_wrong_magic(repository, saved_path):
    _rewrite(saved_path, lambda lines: ["SOMETHING v1"] + lines[1:])

    with pytest.raises(DictionaryFormatError):
        repository.load(saved_path)


def test_truncated_file(repository, saved_path):
    """Test that a missing trailing state is reported past the last line"""
    _rewrite(saved_path, lambda lines: lines[:-1])

    with pytest.raises(DictionaryFormatError) as excinfo:
        repository.load(saved_path)

    assert "ends before" in str(excinfo.value)


def test_bad_number_reports_its_offset(repository, saved_path):
    """Test line and column of an unparsable value"""

    def corrupt(lines):
        lines[4] = "0.5 oops " + lines[4]
        return lines

    _rewrite(saved_path, corrupt)

    with pytest.raises(DictionaryFormatError) as excinfo:
        repository.load(saved_path)

    assert excinfo.value.line == 5
    assert excinfo.value.offset == 4


def test_short_state_line(repository, saved_path):
    """Test that a state with too few values is refused"""

    def shorten(lines):
        lines[4] = " ".join(lines[4].split()[:-1])
        return lines

    _rewrite(saved_path, shorten)

    with pytest.raises(DictionaryFormatError) as excinfo:
        repository.load(saved_path)

    assert excinfo.value.line == 5


def test_header_key_out_of_order(repository, saved_path):
    _rewrite(saved_path, lambda lines: [lines[0], lines[1].replace("N 5 P 2", "P 2 N 5")] + lines[2:])

    with pytest.raises(DictionaryFormatError) as excinfo:
        repository.load(saved_path)

    assert excinfo.value.line == 2


def test_missing_file_raises_os_error(repository, tmp_path):
    with pytest.raises(OSError):
        repository.load(str(tmp_path / "absent.dict"))


def test_non_ascii_byte_is_a_format_error(repository, saved_path):
    """Test that an undecodable byte is reported with its line and offset"""
    with open(saved_path, "rb") as handle:
        lines = handle.read().split(b"\n")
    lines[4] = b"1.0 \xff2.0"
    with open(saved_path, "wb") as handle:
        handle.write(b"\n".join(lines))

    with pytest.raises(DictionaryFormatError) as excinfo:
        repository.load(saved_path)

    assert excinfo.value.line == 5
    assert excinfo.value.offset == 4
    assert "0xff" in str(excinfo.value)
