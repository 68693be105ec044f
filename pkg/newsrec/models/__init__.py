"""Torch modules for content-based news recommendation."""
from newsrec.models.attention import AdditiveAttention, PersonalizedAttention, additive_attention
from newsrec.models.encoders import NewsEncoder, UserEncoder, build_user_encoder
from newsrec.models.loss import ranking_softmax_loss
from newsrec.models.recommender import NewsRecommender, score

__all__ = [
    "AdditiveAttention",
    "PersonalizedAttention",
    "additive_attention",
    "NewsEncoder",
    "UserEncoder",
    "build_user_encoder",
    "ranking_softmax_loss",
    "NewsRecommender",
    "score",
]
