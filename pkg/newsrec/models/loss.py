"""Softmax ranking loss over one positive and K sampled negatives."""
import torch


def ranking_softmax_loss(scores: torch.Tensor, label_index: torch.Tensor) -> torch.Tensor:
    """Mean cross-entropy of softmax(scores) against the positive's position.

    Args:
        scores: (B, K+1) or (K+1,) candidate scores.
        label_index: (B,) or scalar position of the positive.
    """
    if scores.dim() == 1:
        scores = scores.unsqueeze(0)
        label_index = torch.as_tensor(label_index).reshape(1)
    label_index = torch.as_tensor(label_index, device=scores.device).long()
    n_candidates = scores.shape[-1]
    if bool(((label_index < 0) | (label_index >= n_candidates)).any()):
        raise ValueError(f"label_index out of range for {n_candidates} candidates")
    shifted = scores - scores.max(dim=-1, keepdim=True).values
    log_norm = torch.log(torch.exp(shifted).sum(dim=-1))
    positive = shifted.gather(-1, label_index.unsqueeze(-1)).squeeze(-1)
    return (log_norm - positive).mean()
