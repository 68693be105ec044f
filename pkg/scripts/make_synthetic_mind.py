"""Write a small MIND-format dataset where clicks depend only on category.

Titles are shared across categories, so only category information
separates liked from disliked candidates.

Usage:
    python scripts/make_synthetic_mind.py --out data/synthetic

    # Larger run
    python scripts/make_synthetic_mind.py --out data/synthetic --impressions 5000 --articles 500

Produces news.tsv, behaviors_train.tsv, behaviors_test.tsv and
descriptions_fixture.json (key -> description, for ``--fixture``).
"""
import argparse
import json
from pathlib import Path

from newsrec.converters.mind_tsv import write_behaviors, write_news
from newsrec.services.synthetic import build_synthetic_dataset


def make_synthetic_mind(out_dir, n_articles=200, n_categories=10, n_impressions=1000, n_users=100, seed=0):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    data = build_synthetic_dataset(
        n_articles=n_articles,
        n_categories=n_categories,
        n_impressions=n_impressions,
        n_users=n_users,
        seed=seed,
    )
    write_news(out / "news.tsv", data.articles)
    write_behaviors(out / "behaviors_train.tsv", data.train)
    write_behaviors(out / "behaviors_test.tsv", data.test)
    (out / "descriptions_fixture.json").write_text(
        json.dumps(data.descriptions, indent=2, sort_keys=True), encoding="utf-8"
    )
    print(f"  news       {len(data.articles)} articles, {len(data.descriptions)} categories")
    print(f"  train      {len(data.train)} impressions")
    print(f"  test       {len(data.test)} impressions")
    print(f"\nDone: {out}")
    return data


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Write a synthetic MIND-format dataset")
    parser.add_argument("--out", required=True, help="Output directory")
    parser.add_argument("--articles", type=int, default=200)
    parser.add_argument("--categories", type=int, default=10)
    parser.add_argument("--impressions", type=int, default=1000)
    parser.add_argument("--users", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print(f"Writing synthetic dataset to: {args.out}")
    make_synthetic_mind(
        args.out,
        n_articles=args.articles,
        n_categories=args.categories,
        n_impressions=args.impressions,
        n_users=args.users,
        seed=args.seed,
    )
