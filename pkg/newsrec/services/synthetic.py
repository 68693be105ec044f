"""Synthetic click logs where clicks depend only on category."""
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Dict, List

import numpy as np

from newsrec.converters.mind_tsv import category_key
from newsrec.schemas.mind import Impression, NewsArticle

CATEGORIES = [
    ("sports", "golf", ["golf", "birdie", "fairway", "putter", "caddie", "tournament"]),
    ("finance", "real-estate", ["mortgage", "housing", "realtor", "property", "listing", "rent"]),
    ("tv", "golden-globes", ["awards", "ceremony", "nominee", "television", "trophy", "gala"]),
    ("news", "politics", ["election", "senate", "ballot", "campaign", "congress", "policy"]),
    ("travel", "tips", ["airport", "luggage", "itinerary", "passport", "hotel", "beach"]),
    ("food", "recipes", ["baking", "oven", "flavor", "ingredient", "dessert", "kitchen"]),
    ("health", "fitness", ["workout", "muscle", "cardio", "stretching", "gym", "wellness"]),
    ("autos", "electric", ["battery", "charging", "sedan", "mileage", "dealership", "engine"]),
    ("music", "concerts", ["guitar", "stage", "album", "singer", "tour", "festival"]),
    ("weather", "storms", ["hurricane", "rainfall", "forecast", "tornado", "flooding", "wind"]),
]

# Shared by every category, so titles say nothing about what an article is about.
GENERIC_TITLES = [
    "You will not believe what happened today",
    "Here is the latest update everyone is talking about",
    "What you need to know this week",
    "The story behind the headlines",
    "A closer look at a developing story",
]


@dataclass
class SyntheticDataset:
    articles: List[NewsArticle]
    train: List[Impression]
    test: List[Impression]
    descriptions: Dict[str, str]
    affinities: Dict[str, List[str]] = field(default_factory=dict)


def describe(key: str, words: List[str]) -> str:
    return (
        f"The {key} category covers {words[0]}, {words[1]} and {words[2]} stories, "
        f"with coverage of {words[3]}, {words[4]} and {words[5]} for readers who follow {words[0]}."
    )


def build_synthetic_dataset(
    n_articles: int = 200,
    n_categories: int = 10,
    n_impressions: int = 1000,
    n_users: int = 100,
    history_size: int = 10,
    n_positive: int = 2,
    n_negative: int = 6,
    liked_per_user: int = 2,
    test_fraction: float = 0.2,
    seed: int = 0,
) -> SyntheticDataset:
    """Articles spread evenly over categories, users that click exactly their liked categories."""
    if not 2 <= n_categories <= len(CATEGORIES):
        raise ValueError(f"n_categories must be in [2, {len(CATEGORIES)}]")
    if liked_per_user >= n_categories:
        raise ValueError("users must dislike at least one category")
    rng = np.random.default_rng(seed)
    cats = CATEGORIES[:n_categories]

    articles: List[NewsArticle] = []
    by_key: Dict[str, List[str]] = {}
    descriptions: Dict[str, str] = {}
    for i in range(n_articles):
        category, subcategory, words = cats[i % n_categories]
        article = NewsArticle(
            news_id=f"N{i + 1}",
            category=category,
            subcategory=subcategory,
            title=GENERIC_TITLES[int(rng.integers(len(GENERIC_TITLES)))],
        )
        key = category_key(article)
        articles.append(article)
        by_key.setdefault(key, []).append(article.news_id)
        descriptions.setdefault(key, describe(key, words))

    keys = list(by_key)
    affinities = {
        f"U{u + 1}": [keys[j] for j in rng.choice(len(keys), size=liked_per_user, replace=False)]
        for u in range(n_users)
    }
    users = list(affinities)
    start = datetime(2019, 11, 11, 9, 0, 0)

    impressions: List[Impression] = []
    for i in range(n_impressions):
        user_id = users[int(rng.integers(len(users)))]
        liked = affinities[user_id]
        liked_pool = [n for k in liked for n in by_key[k]]
        other_pool = [n for k in keys if k not in liked for n in by_key[k]]
        history = [liked_pool[j] for j in rng.choice(len(liked_pool), size=history_size, replace=False)]
        shown = set(history)
        positives = [n for n in rng.permutation(liked_pool) if n not in shown][:n_positive]
        negatives = list(rng.choice(other_pool, size=n_negative, replace=False))
        candidates = [(str(n), 1) for n in positives] + [(str(n), 0) for n in negatives]
        order = rng.permutation(len(candidates))
        impressions.append(
            Impression(
                impression_id=str(i + 1),
                user_id=user_id,
                timestamp=start + timedelta(minutes=i),
                history=history,
                candidates=[candidates[j] for j in order],
            )
        )

    n_test = int(round(n_impressions * test_fraction))
    return SyntheticDataset(
        articles=articles,
        train=impressions[: n_impressions - n_test],
        test=impressions[n_impressions - n_test:],
        descriptions=descriptions,
        affinities=affinities,
    )
