"""News and user encoders."""
from typing import Tuple

import torch
import torch.nn as nn
import torch.nn.functional as F

from newsrec.core.exceptions import ConfigurationError
from newsrec.models.attention import AdditiveAttention, PersonalizedAttention
from newsrec.schemas.training import Arch, ModelConfig


class NewsEncoder(nn.Module):
    """PLM token states -> linear projection -> additive attention over real tokens."""

    def __init__(self, plm: nn.Module, config: ModelConfig):
        super().__init__()
        self.plm = plm
        self.max_len = config.max_len
        self.projection = nn.Linear(plm.config.hidden_size, config.d_news)
        self.attention = AdditiveAttention(config.d_news, config.attn_hidden)
        if config.freeze_plm:
            self.plm.requires_grad_(False)

    def token_states(self, input_ids: torch.Tensor, attention_mask: torch.Tensor) -> torch.Tensor:
        """Projected per-token states, (N, L, d_news)."""
        if input_ids.shape[-1] != self.max_len:
            raise ConfigurationError(
                f"tokenized length {input_ids.shape[-1]} != configured max_len {self.max_len}",
                param="max_len",
            )
        hidden = self.plm(input_ids=input_ids, attention_mask=attention_mask).last_hidden_state
        return self.projection(hidden)

    def forward(self, input_ids: torch.Tensor, attention_mask: torch.Tensor) -> torch.Tensor:
        states = self.token_states(input_ids, attention_mask)
        pooled, _ = self.attention(states, attention_mask.bool())
        return pooled


class UserEncoder(nn.Module):
    """Aggregates history news vectors; rows with no history get a learned cold-start vector."""

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.history_len = config.history_len
        self.cold_start = nn.Parameter(torch.empty(config.d_news).normal_(0.0, 0.02))

    def pool(
        self, history: torch.Tensor, mask: torch.Tensor, user_index: torch.Tensor
    ) -> Tuple[torch.Tensor, torch.Tensor]:
        raise NotImplementedError

    def attend(
        self, history: torch.Tensor, mask: torch.Tensor, user_index: torch.Tensor
    ) -> Tuple[torch.Tensor, torch.Tensor]:
        """User vectors (B, d) and attention weights over history (B, L)."""
        batch, length, dim = history.shape
        if length > self.history_len:
            raise ValueError(f"history of length {length} exceeds history_len {self.history_len}")
        mask = mask.bool()
        has_history = mask.any(dim=-1)
        if length == 0 or not bool(has_history.any()):
            weights = torch.zeros(batch, length, dtype=history.dtype, device=history.device)
            return self.cold_start.expand(batch, dim), weights
        # Empty rows attend to a padded slot; their output is replaced below.
        safe_mask = mask.clone()
        safe_mask[~has_history, 0] = True
        pooled, weights = self.pool(history, safe_mask, user_index)
        user = torch.where(has_history.unsqueeze(-1), pooled, self.cold_start.expand_as(pooled))
        weights = weights * has_history.unsqueeze(-1)
        return user, weights

    def forward(
        self, history: torch.Tensor, mask: torch.Tensor, user_index: torch.Tensor
    ) -> torch.Tensor:
        return self.attend(history, mask, user_index)[0]


class NamlUserEncoder(UserEncoder):
    """Additive attention over browsed news."""

    def __init__(self, config: ModelConfig):
        super().__init__(config)
        self.attention = AdditiveAttention(config.d_news, config.attn_hidden)

    def pool(self, history, mask, user_index):
        return self.attention(history, mask)


class NrmsUserEncoder(UserEncoder):
    """Multi-head self-attention over browsed news (no positions), then additive attention."""

    def __init__(self, config: ModelConfig):
        super().__init__(config)
        self.self_attention = nn.MultiheadAttention(
            embed_dim=config.d_news, num_heads=config.n_heads, batch_first=True
        )
        self.attention = AdditiveAttention(config.d_news, config.attn_hidden)

    def pool(self, history, mask, user_index):
        contextual, _ = self.self_attention(
            history, history, history, key_padding_mask=~mask, need_weights=False
        )
        return self.attention(contextual, mask)


class NpaUserEncoder(UserEncoder):
    """Personalized attention: the query comes from a user-id embedding.

    Index 0 of the embedding table is the shared fallback for unseen users.
    """

    def __init__(self, config: ModelConfig, n_users: int):
        super().__init__(config)
        self.user_embedding = nn.Embedding(n_users + 1, config.user_embed_dim)
        self.query_proj = nn.Linear(config.user_embed_dim, config.attn_hidden)
        self.attention = PersonalizedAttention(config.d_news, config.attn_hidden)

    def pool(self, history, mask, user_index):
        query = F.relu(self.query_proj(self.user_embedding(user_index)))
        return self.attention(history, mask, query)


def build_user_encoder(config: ModelConfig, n_users: int = 0) -> UserEncoder:
    if config.arch == Arch.NAML:
        return NamlUserEncoder(config)
    if config.arch == Arch.NRMS:
        return NrmsUserEncoder(config)
    return NpaUserEncoder(config, n_users)
