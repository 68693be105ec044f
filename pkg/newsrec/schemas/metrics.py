"""Evaluation report."""
from typing import Optional

from pydantic import BaseModel, Field

COLUMNS = (("AUC", "auc"), ("MRR", "mrr"), ("nDCG@5", "ndcg5"), ("nDCG@10", "ndcg10"))


class MetricReport(BaseModel):
    auc: float = Field(ge=0.0, le=1.0)
    mrr: float = Field(ge=0.0, le=1.0)
    ndcg5: float = Field(ge=0.0, le=1.0)
    ndcg10: float = Field(ge=0.0, le=1.0)
    n_scored: int = Field(ge=0)
    n_skipped: int = Field(ge=0)
    # Subset of n_skipped caused by news ids missing from the catalog.
    n_unknown_news: int = Field(default=0, ge=0)

    @property
    def n_total(self) -> int:
        return self.n_scored + self.n_skipped

    def to_table(self, label: str = "measured", reference: Optional["MetricReport"] = None) -> str:
        """Aligned plain-text table, columns AUC, MRR, nDCG@5, nDCG@10."""
        rows = [(label, self)]
        if reference is not None:
            rows.append(("reference", reference))
        width = max(len("run"), *(len(name) for name, _ in rows))
        header = "run".ljust(width) + "".join(f"  {title:>8}" for title, _ in COLUMNS)
        lines = [header, "-" * len(header)]
        for name, report in rows:
            values = "".join(f"  {getattr(report, field):>8.4f}" for _, field in COLUMNS)
            lines.append(name.ljust(width) + values)
        lines.append(f"scored={self.n_scored} skipped={self.n_skipped}")
        return "\n".join(lines)


# Reference results keyed by (arch, plm, mode): AUC, MRR, nDCG@5, nDCG@10.
REFERENCE_RESULTS = {
    ("naml", "distilbert-base", "title"): (0.675, 0.292, 0.317, 0.384),
    ("naml", "distilbert-base", "template"): (0.690, 0.295, 0.327, 0.393),
    ("naml", "distilbert-base", "generated"): (0.713, 0.326, 0.363, 0.425),
    ("naml", "bert-base", "title"): (0.700, 0.318, 0.350, 0.414),
    ("naml", "bert-base", "template"): (0.696, 0.308, 0.340, 0.405),
    ("naml", "bert-base", "generated"): (0.707, 0.322, 0.357, 0.420),
    ("nrms", "distilbert-base", "title"): (0.674, 0.297, 0.322, 0.387),
    ("nrms", "distilbert-base", "template"): (0.675, 0.311, 0.341, 0.400),
    ("nrms", "distilbert-base", "generated"): (0.707, 0.324, 0.359, 0.422),
    ("nrms", "bert-base", "title"): (0.689, 0.306, 0.336, 0.400),
    ("nrms", "bert-base", "template"): (0.667, 0.301, 0.329, 0.389),
    ("nrms", "bert-base", "generated"): (0.706, 0.320, 0.355, 0.418),
    ("npa", "distilbert-base", "title"): (0.700, 0.311, 0.344, 0.408),
    ("npa", "distilbert-base", "template"): (0.698, 0.309, 0.342, 0.407),
    ("npa", "distilbert-base", "generated"): (0.707, 0.319, 0.354, 0.417),
    ("npa", "bert-base", "title"): (0.689, 0.301, 0.332, 0.398),
    ("npa", "bert-base", "template"): (0.694, 0.314, 0.345, 0.410),
    ("npa", "bert-base", "generated"): (0.710, 0.324, 0.360, 0.422),
}


def reference_report(arch: str, plm: str, mode: str) -> Optional[MetricReport]:
    """Reference row for a configuration, if there is one."""
    row = REFERENCE_RESULTS.get((arch, plm, mode))
    if row is None:
        return None
    auc, mrr, ndcg5, ndcg10 = row
    return MetricReport(auc=auc, mrr=mrr, ndcg5=ndcg5, ndcg10=ndcg10, n_scored=0, n_skipped=0)
