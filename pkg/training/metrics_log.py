import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, TextIO

from pydantic import BaseModel

logger = logging.getLogger(__name__)


class MetricLog:
    """JSON-lines record stream; the first record is always the resolved config."""

    def __init__(self, path: Optional[Path] = None):
        self.path = Path(path) if path is not None else None
        self.records: List[Dict[str, Any]] = []
        self._fh: Optional[TextIO] = None
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._fh = self.path.open("w", encoding="utf-8", newline="\n")

    def _emit(self, record: Dict[str, Any]) -> None:
        line = json.dumps(record, sort_keys=True)
        self.records.append(record)
        if self._fh is not None:
            self._fh.write(line + "\n")
            self._fh.flush()
        logger.info("%s", line)

    def write_config(self, config: BaseModel, **extra: Any) -> None:
        record = {"event": "config", **config.model_dump(mode="json"), **extra}
        self._emit(record)

    def write(self, record: BaseModel) -> None:
        self._emit(record.model_dump(mode="json"))

    def write_event(self, event: str, **fields: Any) -> None:
        self._emit({"event": event, **fields})

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self) -> "MetricLog":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def read_metric_log(path) -> List[Dict[str, Any]]:
    with Path(path).open(encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
