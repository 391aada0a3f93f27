"""Line-delimited JSON telemetry for training runs.

One record per generator step: losses, per-condition conditioning
losses, and the adaptive gamma weights. This is the data behind the
training-performance figures and the divergence diagnostics.
"""

from __future__ import annotations

import json
from pathlib import Path


class TelemetryWriter:
    def __init__(self, path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "a")

    def log(self, **fields) -> None:
        self._fh.write(json.dumps(fields) + "\n")

    def flush(self) -> None:
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_telemetry(path) -> list[dict]:
    records = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records
