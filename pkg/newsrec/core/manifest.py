"""One provenance manifest per command run."""
import hashlib
import logging
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Union

from newsrec.schemas.manifest import RunManifest

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def file_digest(path: PathLike, chunk_size: int = 1 << 20) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(chunk_size), b""):
            digest.update(chunk)
    return f"sha256:{digest.hexdigest()}"


def digest_inputs(inputs: Dict[str, Optional[PathLike]]) -> Dict[str, str]:
    """Digest every existing input file; directories and missing paths are skipped."""
    return {
        name: file_digest(path)
        for name, path in inputs.items()
        if path is not None and Path(path).is_file()
    }


@contextmanager
def run_manifest(
    command: str,
    path: PathLike,
    inputs: Dict[str, Optional[PathLike]],
    config: Optional[Dict[str, Any]] = None,
    seed: Optional[int] = None,
) -> Iterator[RunManifest]:
    """Yield a manifest to fill in; it is written to ``path`` whether the run succeeds or not."""
    manifest = RunManifest(
        command=command,
        config=config or {},
        input_digests=digest_inputs(inputs),
        seed=seed,
        started_at=datetime.now(timezone.utc),
    )
    try:
        yield manifest
        manifest.status = "ok"
    except BaseException:
        manifest.status = "failed"
        raise
    finally:
        manifest.finished_at = datetime.now(timezone.utc)
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(manifest.model_dump_json(indent=2), encoding="utf-8")
        logger.debug("[Manifest] %s -> %s (%s)", command, path, manifest.status)
