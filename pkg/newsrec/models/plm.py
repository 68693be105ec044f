"""Pretrained language model and tokenizer loading."""
import logging
from pathlib import Path
from typing import Iterable, Optional, Union

from tokenizers import Tokenizer, models, normalizers, pre_tokenizers, processors
from transformers import (
    AutoModel,
    AutoTokenizer,
    BertConfig,
    BertModel,
    PreTrainedModel,
    PreTrainedTokenizerFast,
)

from newsrec.core.config import settings
from newsrec.schemas.training import ModelConfig, PlmChoice

logger = logging.getLogger(__name__)

SPECIAL_TOKENS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]


def build_toy_tokenizer(texts: Iterable[str], model_max_length: int = 512) -> PreTrainedTokenizerFast:
    """Word-level tokenizer with BERT special tokens over the words in ``texts``."""
    normalizer = normalizers.BertNormalizer(lowercase=True)
    pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    words = set()
    for text in texts:
        for token in SPECIAL_TOKENS:
            text = text.replace(token, " ")
        for word, _ in pre_tokenizer.pre_tokenize_str(normalizer.normalize_str(text)):
            words.add(word)
    vocab = {token: i for i, token in enumerate(SPECIAL_TOKENS)}
    for word in sorted(words - set(SPECIAL_TOKENS)):
        vocab[word] = len(vocab)

    tokenizer = Tokenizer(models.WordLevel(vocab=vocab, unk_token="[UNK]"))
    tokenizer.normalizer = normalizer
    tokenizer.pre_tokenizer = pre_tokenizer
    tokenizer.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B:1 [SEP]:1",
        special_tokens=[("[CLS]", vocab["[CLS]"]), ("[SEP]", vocab["[SEP]"])],
    )
    tokenizer.add_special_tokens(SPECIAL_TOKENS)
    return PreTrainedTokenizerFast(
        tokenizer_object=tokenizer,
        unk_token="[UNK]",
        pad_token="[PAD]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
        model_max_length=model_max_length,
    )


def build_toy_plm(config: ModelConfig, vocab_size: int) -> BertModel:
    """Randomly initialised small BERT standing in for a pretrained encoder."""
    bert_config = BertConfig(
        vocab_size=vocab_size,
        hidden_size=config.toy_hidden,
        num_hidden_layers=config.toy_layers,
        num_attention_heads=config.toy_heads,
        intermediate_size=config.toy_hidden * 2,
        max_position_embeddings=max(512, config.max_len),
        pad_token_id=0,
    )
    return BertModel(bert_config, add_pooling_layer=False)


def load_tokenizer(
    config: ModelConfig,
    texts: Optional[Iterable[str]] = None,
    path: Optional[Union[str, Path]] = None,
):
    """Tokenizer for ``config.plm_name``; from ``path`` when restoring a checkpoint."""
    if config.plm_name == PlmChoice.TOY:
        if path is not None:
            return PreTrainedTokenizerFast.from_pretrained(str(path))
        if texts is None:
            raise ValueError("the toy tokenizer is built from corpus texts")
        return build_toy_tokenizer(texts, model_max_length=max(512, config.max_len))
    source = str(path) if path is not None else config.pretrained_id
    logger.info("[PLM] Loading tokenizer %s", source)
    return AutoTokenizer.from_pretrained(source, cache_dir=settings.hf_cache_dir)


def load_plm(
    config: ModelConfig,
    tokenizer=None,
    path: Optional[Union[str, Path]] = None,
) -> PreTrainedModel:
    if config.plm_name == PlmChoice.TOY:
        if path is not None:
            return BertModel.from_pretrained(str(path), add_pooling_layer=False)
        return build_toy_plm(config, vocab_size=len(tokenizer))
    source = str(path) if path is not None else config.pretrained_id
    logger.info("[PLM] Loading encoder %s", source)
    return AutoModel.from_pretrained(source, cache_dir=settings.hf_cache_dir)
