"""Checkpoint directory: PLM weights, head tensors, JSON sidecar."""
import json
import logging
from pathlib import Path
from typing import Dict, Tuple, Union

from pydantic import ValidationError
from safetensors.torch import load_file, save_file

from newsrec.core.exceptions import CheckpointError
from newsrec.models.plm import load_plm, load_tokenizer
from newsrec.models.recommender import NewsRecommender
from newsrec.schemas.training import ModelConfig

logger = logging.getLogger(__name__)

PLM_DIR = "plm"
HEAD_FILE = "head.safetensors"
SIDECAR_FILE = "newsrec_config.json"
FORMAT_VERSION = 1
PLM_PREFIX = "news_encoder.plm."


def save_checkpoint(
    path: Union[str, Path],
    model: NewsRecommender,
    tokenizer,
    user_index: Dict[str, int],
) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    model.news_encoder.plm.save_pretrained(path / PLM_DIR)
    tokenizer.save_pretrained(path / PLM_DIR)
    head = {
        name: tensor.detach().cpu().contiguous()
        for name, tensor in model.state_dict().items()
        if not name.startswith(PLM_PREFIX)
    }
    save_file(head, str(path / HEAD_FILE))
    sidecar = {
        "format_version": FORMAT_VERSION,
        "model_config": model.config.model_dump(mode="json"),
        "tokenizer": model.config.pretrained_id,
        "max_len": model.config.max_len,
        "user_index": user_index,
    }
    (path / SIDECAR_FILE).write_text(json.dumps(sidecar, indent=2), encoding="utf-8")
    logger.info("[Checkpoint] Saved %s", path)
    return path


def load_checkpoint(path: Union[str, Path]) -> Tuple[NewsRecommender, object, Dict[str, int]]:
    """Rebuild model, tokenizer and user index; the sidecar's config is authoritative."""
    path = Path(path)
    for required in (PLM_DIR, HEAD_FILE, SIDECAR_FILE):
        if not (path / required).exists():
            raise CheckpointError(f"Checkpoint {path} is missing {required}", param=required)
    try:
        sidecar = json.loads((path / SIDECAR_FILE).read_text(encoding="utf-8"))
        config = ModelConfig.model_validate(sidecar["model_config"])
        user_index = {str(k): int(v) for k, v in sidecar.get("user_index", {}).items()}
    except (json.JSONDecodeError, KeyError, ValidationError) as e:
        raise CheckpointError(f"Unreadable checkpoint sidecar in {path}: {e}", param=SIDECAR_FILE)
    if sidecar.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(f"Unsupported checkpoint format {sidecar.get('format_version')}")
    if sidecar.get("max_len") != config.max_len:
        raise CheckpointError("Sidecar max_len does not match its model config", param="max_len")

    tokenizer = load_tokenizer(config, path=path / PLM_DIR)
    plm = load_plm(config, tokenizer, path=path / PLM_DIR)
    model = NewsRecommender(config, plm, n_users=len(user_index))
    head = load_file(str(path / HEAD_FILE))
    try:
        missing, unexpected = model.load_state_dict(head, strict=False)
    except RuntimeError as e:
        raise CheckpointError(f"Head parameters do not fit the configured model: {e}")
    missing = [name for name in missing if not name.startswith(PLM_PREFIX)]
    if missing or unexpected:
        raise CheckpointError(
            f"Head/config mismatch: missing={missing[:5]} unexpected={list(unexpected)[:5]}"
        )
    model.eval()
    return model, tokenizer, user_index
