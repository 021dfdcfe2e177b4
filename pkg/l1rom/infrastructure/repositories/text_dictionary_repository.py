import logging
import os
from typing import Iterator, List, Tuple

import numpy as np

from l1rom.domain.entities.dictionary import Dictionary
from l1rom.domain.entities.grid import Grid1D, GridField, Trajectory
from l1rom.domain.errors import DictionaryFormatError
from l1rom.domain.repositories.dictionary_repository import DictionaryRepository

logger = logging.getLogger(__name__)

MAGIC = "L1ROM-DICT"
VERSION = "v1"
LOADED_SCHEME_ID = "dictionary-file"
_HEADER_KEYS = ("N", "P", "K", "T", "PERIODIC", "XMIN", "XMAX")


def _format_numbers(values) -> str:
    # repr of a Python float is the shortest string that parses back to the same double
    return " ".join(repr(float(v)) for v in np.asarray(values).ravel().tolist())


class _LineReader:
    """Numbered line access that reports truncation as a format error"""

    def __init__(self, lines: List[str]):
        self._lines = lines
        self.number = 0

    def next(self, what: str) -> str:
        if self.number >= len(self._lines):
            raise DictionaryFormatError(f"file ends before {what}", line=self.number + 1)
        line = self._lines[self.number].rstrip("\n")
        self.number += 1
        return line


def _tokens(line: str) -> Iterator[Tuple[int, str]]:
    """(offset, token) pairs of a whitespace-separated line"""
    offset = 0
    for token in line.split():
        offset = line.index(token, offset)
        yield offset, token
        offset += len(token)


def _parse_floats(line: str, line_number: int, expected: int, what: str) -> np.ndarray:
    values = []
    for offset, token in _tokens(line):
        try:
            values.append(float(token))
        except ValueError:
            raise DictionaryFormatError(f"bad number {token!r} in {what}", line=line_number, offset=offset)
    if len(values) != expected:
        raise DictionaryFormatError(
            f"{what} has {len(values)} values, expected {expected}", line=line_number, offset=len(line)
        )
    return np.array(values, dtype=float)


class TextDictionaryRepository(DictionaryRepository):
    """Dictionary persistence in the line-oriented L1ROM-DICT v1 text format"""

    def save(self, dictionary: Dictionary, path: str) -> None:
        grid = dictionary.grid
        lines = [
            f"{MAGIC} {VERSION}",
            " ".join(
                [
                    f"N {grid.n_cells}",
                    f"P {dictionary.n_components}",
                    f"K {len(dictionary)}",
                    f"T {dictionary.n_times}",
                    f"PERIODIC {int(grid.periodic)}",
                    f"XMIN {grid.x_min!r}",
                    f"XMAX {grid.x_max!r}",
                ]
            ),
            _format_numbers(dictionary.time_grid),
        ]
        for entry in dictionary.entries:
            lines.append("MU " + _format_numbers(entry.mu))
            lines.extend(_format_numbers(state.values) for state in entry.states)

        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w", encoding="ascii") as handle:
            handle.write("\n".join(lines) + "\n")
        logger.info("saved %d-member dictionary to %s", len(dictionary), path)

    def load(self, path: str, seed: int = 0) -> Dictionary:
        with open(path, "rb") as handle:
            raw = handle.read()
        try:
            text = raw.decode("ascii")
        except UnicodeDecodeError as exc:
            line_start = raw.rfind(b"\n", 0, exc.start) + 1
            raise DictionaryFormatError(
                f"non-ASCII byte 0x{raw[exc.start]:02x}",
                line=raw.count(b"\n", 0, exc.start) + 1,
                offset=exc.start - line_start,
            ) from None
        reader = _LineReader(text.splitlines(keepends=True))

        magic = reader.next("the version line").split()
        if len(magic) != 2 or magic[0] != MAGIC:
            raise DictionaryFormatError(f"not a {MAGIC} file", line=1, offset=0)
        if magic[1] != VERSION:
            raise DictionaryFormatError(f"unsupported version {magic[1]!r}, expected {VERSION}", line=1, offset=len(MAGIC) + 1)

        header = self._parse_header(reader.next("the size header"), reader.number)
        n_cells, p, k, n_times = header["N"], header["P"], header["K"], header["T"]
        try:
            grid = Grid1D(
                x_min=header["XMIN"], x_max=header["XMAX"], n_cells=int(n_cells), periodic=bool(header["PERIODIC"])
            )
        except ValueError as exc:
            raise DictionaryFormatError(f"invalid grid: {exc}", line=2)

        times = _parse_floats(reader.next("the time grid"), reader.number, n_times, "time grid")
        entries = []
        for _ in range(k):
            mu_line = reader.next("a MU line")
            if not mu_line.startswith("MU "):
                raise DictionaryFormatError("expected a MU line", line=reader.number, offset=0)
            n_mu = len(mu_line[3:].split())
            if n_mu == 0:
                raise DictionaryFormatError("MU line lists no parameter values", line=reader.number, offset=3)
            mu = tuple(float(v) for v in _parse_floats(mu_line[3:], reader.number, n_mu, "MU"))
            states = []
            for _ in range(n_times):
                values = _parse_floats(reader.next("a state line"), reader.number, n_cells * p, "state")
                try:
                    states.append(GridField(grid=grid, n_components=p, values=values))
                except ValueError as exc:
                    raise DictionaryFormatError(f"invalid state: {exc}", line=reader.number)
            try:
                entries.append(Trajectory(mu=mu, times=times, states=states, scheme_id=LOADED_SCHEME_ID))
            except ValueError as exc:
                raise DictionaryFormatError(f"invalid trajectory: {exc}", line=reader.number)

        try:
            dictionary = Dictionary(entries=entries, seed=seed)
        except ValueError as exc:
            raise DictionaryFormatError(f"invalid dictionary: {exc}", line=reader.number)
        logger.info("loaded %d-member dictionary from %s", len(dictionary), path)
        return dictionary

    @staticmethod
    def _parse_header(line: str, line_number: int) -> dict:
        tokens = list(_tokens(line))
        if len(tokens) != 2 * len(_HEADER_KEYS):
            raise DictionaryFormatError("size header must list N P K T PERIODIC XMIN XMAX", line=line_number)
        header = {}
        for (key_offset, key), (value_offset, value), expected in zip(tokens[::2], tokens[1::2], _HEADER_KEYS):
            if key != expected:
                raise DictionaryFormatError(f"expected {expected}, found {key!r}", line=line_number, offset=key_offset)
            try:
                header[key] = float(value) if key in ("XMIN", "XMAX") else int(value)
            except ValueError:
                raise DictionaryFormatError(f"bad value {value!r} for {key}", line=line_number, offset=value_offset)
            if key in ("N", "P", "K", "T") and header[key] < 1:
                raise DictionaryFormatError(f"{key} must be positive", line=line_number, offset=value_offset)
        return header
