"""
Run manifests: a JSON record written next to every file a command produces.
"""

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Mapping, Sequence, Union

from .. import __version__

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"


def config_hash(config: Mapping[str, Any]) -> str:
    """SHA-256 of the canonical JSON form; key order does not matter."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def file_sha256(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


@dataclass
class RunManifest:
    tool_version: str
    command: str
    config_hash: str
    master_seed: int
    timestamp: str
    outputs: List[Dict[str, str]] = field(default_factory=list)

    @classmethod
    def create(cls, command: str, config: Mapping[str, Any], master_seed: int,
               outputs: Sequence[Union[str, Path]]) -> "RunManifest":
        return cls(
            tool_version=__version__,
            command=command,
            config_hash=config_hash(config),
            master_seed=int(master_seed),
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            outputs=[{"path": Path(p).name, "sha256": file_sha256(p)} for p in outputs],
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        logger.info(f"Wrote manifest to {path}")
        return path
