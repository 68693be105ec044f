"""Attention pooling primitives shared by the news and user encoders."""
from typing import Optional, Tuple

import torch
import torch.nn as nn
import torch.nn.functional as F


def additive_attention(
    H: torch.Tensor,
    mask: torch.Tensor,
    weight: torch.Tensor,
    bias: torch.Tensor,
    query: torch.Tensor,
) -> Tuple[torch.Tensor, torch.Tensor]:
    """Pool ``H`` with weights softmax(q . tanh(W h_i + b)) over valid positions.

    Args:
        H: (..., n, h) inputs.
        mask: (..., n) bool, True on valid positions.
        weight: (a, h); bias: (a,).
        query: (a,) shared query, or (..., a) one query per row (personalized).

    Returns:
        pooled (..., h) and weights (..., n); weights are 0 on masked positions.
    """
    if H.shape[-2] == 0 or not bool(mask.any(dim=-1).all()):
        raise ValueError("additive_attention needs at least one valid position per row")
    keys = torch.tanh(F.linear(H, weight, bias))
    if query.dim() == 1:
        scores = keys @ query
    else:
        scores = (keys * query.unsqueeze(-2)).sum(dim=-1)
    scores = scores.masked_fill(~mask, float("-inf"))
    weights = torch.softmax(scores, dim=-1)
    pooled = (weights.unsqueeze(-1) * H).sum(dim=-2)
    return pooled, weights


class AdditiveAttention(nn.Module):
    """Learned-query additive attention pooling."""

    def __init__(self, input_dim: int, hidden_dim: int):
        super().__init__()
        self.proj = nn.Linear(input_dim, hidden_dim)
        self.query = nn.Parameter(torch.empty(hidden_dim).uniform_(-0.1, 0.1))

    def forward(
        self, H: torch.Tensor, mask: Optional[torch.Tensor] = None
    ) -> Tuple[torch.Tensor, torch.Tensor]:
        if mask is None:
            mask = torch.ones(H.shape[:-1], dtype=torch.bool, device=H.device)
        return additive_attention(H, mask.bool(), self.proj.weight, self.proj.bias, self.query)


class PersonalizedAttention(nn.Module):
    """Additive attention whose query is supplied per row (e.g. from a user embedding)."""

    def __init__(self, input_dim: int, hidden_dim: int):
        super().__init__()
        self.proj = nn.Linear(input_dim, hidden_dim)

    def forward(
        self, H: torch.Tensor, mask: torch.Tensor, query: torch.Tensor
    ) -> Tuple[torch.Tensor, torch.Tensor]:
        return additive_attention(H, mask.bool(), self.proj.weight, self.proj.bias, query)
