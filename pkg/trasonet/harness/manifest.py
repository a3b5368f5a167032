import hashlib
import logging
from importlib import metadata
from pathlib import Path
from typing import Dict, Optional, Union

from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
_TRACKED_PACKAGES = ("trasonet", "numpy", "scipy", "pydantic")


def _version(package: str) -> str:
    try:
        return metadata.version(package)
    except metadata.PackageNotFoundError:
        return "unknown"


def module_versions() -> Dict[str, str]:
    return {package: _version(package) for package in _TRACKED_PACKAGES}


def sha256_of(path: Union[str, Path]) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class RunManifest(BaseModel):
    """
    Describes one command run. Written before any result file and rewritten with the duration
    once the run is over.
    """

    command: str
    config_path: Optional[str] = None
    config_sha256: Optional[str] = None
    "Hash of the config bytes as read."
    seed: Optional[int] = None
    mode: Optional[str] = None
    versions: Dict[str, str] = Field(default_factory=module_versions)
    output_dir: str
    duration_s: Optional[float] = None
    "Wall clock, None while the run is in progress."

    def write(self, directory: Optional[Union[str, Path]] = None) -> Path:
        path = Path(directory or self.output_dir) / MANIFEST_NAME
        path.write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")
        logger.debug(f"Wrote manifest {path}")
        return path


def start_manifest(
    command: str,
    output_dir: Path,
    config_path: Optional[Union[str, Path]] = None,
    seed: Optional[int] = None,
    mode: Optional[str] = None,
) -> RunManifest:
    """
    Create and write the manifest of a run that is about to produce files in `output_dir`.
    """
    manifest = RunManifest(
        command=command,
        config_path=str(config_path) if config_path is not None else None,
        config_sha256=sha256_of(config_path) if config_path is not None else None,
        seed=seed,
        mode=mode,
        output_dir=str(output_dir),
    )
    manifest.write()
    return manifest
