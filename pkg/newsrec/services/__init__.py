"""Services module."""
from newsrec.services.description_service import generate_all, generate_description
from newsrec.services.evaluation_service import evaluate
from newsrec.services.llm_clients import build_llm_client
from newsrec.services.metrics import MetricAccumulator, auc, mrr, ndcg_at_k
from newsrec.services.training_service import train

__all__ = [
    "generate_all",
    "generate_description",
    "evaluate",
    "build_llm_client",
    "MetricAccumulator",
    "auc",
    "mrr",
    "ndcg_at_k",
    "train",
]
