"""News encoder + user encoder + dot-product click scorer."""
from typing import Dict, Iterable, List

import torch
import torch.nn as nn

from newsrec.models.encoders import NewsEncoder, build_user_encoder
from newsrec.schemas.training import ModelConfig

FALLBACK_USER = 0


def score(u: torch.Tensor, v: torch.Tensor) -> torch.Tensor:
    """Dot product over the last dimension; higher means more likely click."""
    if u.shape[-1] != v.shape[-1]:
        raise ValueError(f"dimension mismatch: {u.shape[-1]} vs {v.shape[-1]}")
    return (u * v).sum(dim=-1)


def build_user_index(user_ids: Iterable[str]) -> Dict[str, int]:
    """Ids in first-seen order, numbered from 1; 0 is the unseen-user fallback."""
    index: Dict[str, int] = {}
    for user_id in user_ids:
        if user_id not in index:
            index[user_id] = len(index) + 1
    return index


def lookup_users(user_index: Dict[str, int], user_ids: List[str]) -> torch.Tensor:
    return torch.tensor([user_index.get(u, FALLBACK_USER) for u in user_ids], dtype=torch.long)


class NewsRecommender(nn.Module):
    def __init__(self, config: ModelConfig, plm: nn.Module, n_users: int = 0):
        super().__init__()
        self.config = config
        self.n_users = n_users
        self.news_encoder = NewsEncoder(plm, config)
        self.user_encoder = build_user_encoder(config, n_users)

    def encode_news(self, input_ids: torch.Tensor, attention_mask: torch.Tensor) -> torch.Tensor:
        return self.news_encoder(input_ids, attention_mask)

    def encode_user(
        self, history: torch.Tensor, history_mask: torch.Tensor, user_index: torch.Tensor
    ) -> torch.Tensor:
        return self.user_encoder(history, history_mask, user_index)

    def forward(
        self,
        news_input_ids: torch.Tensor,
        news_attention_mask: torch.Tensor,
        history_index: torch.Tensor,
        candidate_index: torch.Tensor,
        user_index: torch.Tensor,
    ) -> torch.Tensor:
        """Scores (B, C).

        The batch carries each distinct news item once; ``history_index``
        (B, H, -1 for padding) and ``candidate_index`` (B, C) point into it.
        """
        news_vectors = self.encode_news(news_input_ids, news_attention_mask)
        history_mask = history_index >= 0
        history = news_vectors[history_index.clamp(min=0)]
        user = self.encode_user(history, history_mask, user_index)
        candidates = news_vectors[candidate_index]
        return score(user.unsqueeze(1), candidates)
