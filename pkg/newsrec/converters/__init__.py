"""Format converters."""
from newsrec.converters.mind_tsv import parse_behaviors, parse_news, read_behaviors, read_news
from newsrec.converters.text_compose import compose, tokenize

__all__ = ["parse_news", "parse_behaviors", "read_news", "read_behaviors", "compose", "tokenize"]
