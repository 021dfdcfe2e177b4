"""Run manifests and artifact writers for command outputs."""

import hashlib
import logging
import os
import platform
import time
from contextlib import contextmanager
from datetime import datetime, timezone
from typing import Any, Dict

import numpy as np
import pandas as pd
import pydantic
import scipy
from pydantic import BaseModel, Field

import l1rom

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
# repr keeps every float round-trip exact
FLOAT_FORMAT = "%.17g"


def file_digest(path: str) -> str:
    sha = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            sha.update(chunk)
    return sha.hexdigest()


def library_versions() -> Dict[str, str]:
    return {
        "python": platform.python_version(),
        "l1rom": l1rom.__version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
        "pydantic": str(pydantic.VERSION),
    }


class RunManifest(BaseModel):
    """Config echo, versions, per-phase timings and digests of every output"""

    command: str
    config: Dict[str, Any]
    versions: Dict[str, str] = Field(default_factory=library_versions)
    started_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    timings_ms: Dict[str, float] = {}
    outputs: Dict[str, str] = {}
    summary: Dict[str, Any] = {}
    passed: bool = True


class ArtifactWriter:
    """Writes command outputs into one directory and records them in a manifest"""

    def __init__(self, output_dir: str, manifest: RunManifest):
        self.output_dir = output_dir
        self.manifest = manifest
        os.makedirs(output_dir, exist_ok=True)

    def path(self, name: str) -> str:
        return os.path.join(self.output_dir, name)

    def record(self, name: str) -> str:
        """Register an already written file"""
        path = self.path(name)
        self.manifest.outputs[name] = file_digest(path)
        return path

    def write_csv(self, name: str, frame: pd.DataFrame) -> str:
        path = self.path(name)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        logger.info("wrote %s (%d rows)", path, len(frame))
        return self.record(name)

    @contextmanager
    def phase(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.manifest.timings_ms[name] = (time.perf_counter() - start) * 1000.0

    def finish(self) -> RunManifest:
        path = self.path(MANIFEST_NAME)
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(self.manifest.json(indent=2))
        logger.info("wrote manifest %s with %d outputs", path, len(self.manifest.outputs))
        return self.manifest
