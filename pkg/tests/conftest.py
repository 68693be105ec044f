"""Shared fixtures."""
import json
from pathlib import Path

import pytest
import torch

from newsrec.converters.mind_tsv import read_behaviors, read_news
from newsrec.db.description_cache import DescriptionCache
from newsrec.schemas.descriptions import CategoryDescription
from newsrec.schemas.training import Arch, CompositionMode, ModelConfig, PlmChoice

FIXTURES = Path(__file__).parent / "fixtures"

GOLDEN_GLOBES_TEXT = (
    "The TV-Golden Globes category focuses on news related to the Golden Globe Awards "
    "specifically within the television industry. This includes nominations, winners, "
    "notable moments from the ceremony, reactions, and any controversies or highlights "
    "surrounding the event, which honors excellence in TV."
)

# Generated text that misses its category: the articles range well beyond entertainment.
TUNEDIN_TEXT = (
    'The category "tunedin" typically refers to news related to entertainment, media, and '
    "television. It often includes updates on TV shows, interviews with celebrities, insights "
    "into the music industry, and information on streaming services. This category keeps "
    "readers engaged with the latest trends and happenings in the world of entertainment."
)


def toy_config(**overrides) -> ModelConfig:
    """Small toy-encoder config that trains in seconds on CPU."""
    values = dict(
        arch=Arch.NAML,
        plm_name=PlmChoice.TOY,
        mode=CompositionMode.TITLE_GENERATED,
        d_news=16,
        attn_hidden=8,
        n_heads=2,
        user_embed_dim=8,
        toy_hidden=16,
        toy_layers=1,
        toy_heads=2,
        max_len_title=16,
        max_len_augmented=64,
        batch_size=4,
        epochs=1,
        seed=7,
    )
    values.update(overrides)
    return ModelConfig(**values)


@pytest.fixture(autouse=True)
def _seed():
    torch.manual_seed(0)


@pytest.fixture
def news_path() -> Path:
    return FIXTURES / "news.tsv"


@pytest.fixture
def behaviors_path() -> Path:
    return FIXTURES / "behaviors.tsv"


@pytest.fixture
def fixture_path() -> Path:
    return FIXTURES / "descriptions.json"


@pytest.fixture
def articles(news_path):
    return read_news(news_path)


@pytest.fixture
def tunedin_articles():
    return read_news(FIXTURES / "tunedin_news.tsv")


@pytest.fixture
def impressions(behaviors_path):
    return read_behaviors(behaviors_path)


@pytest.fixture
def fixture_texts(fixture_path) -> dict:
    return json.loads(fixture_path.read_text(encoding="utf-8"))


@pytest.fixture
def description_cache(tmp_path, fixture_texts) -> DescriptionCache:
    cache = DescriptionCache(tmp_path / "descriptions.json")
    for key, text in fixture_texts.items():
        cache.put(
            CategoryDescription(key=key, text=text, generator_model="fixture", prompt_fingerprint="0" * 64)
        )
    cache.save()
    return cache


@pytest.fixture
def make_config():
    return toy_config


@pytest.fixture
def golden_globes_text() -> str:
    return GOLDEN_GLOBES_TEXT


@pytest.fixture
def tunedin_text() -> str:
    return TUNEDIN_TEXT
