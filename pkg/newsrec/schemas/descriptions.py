"""Prompt and category-description records."""
import hashlib

from pydantic import BaseModel, Field, model_validator

SYSTEM_MESSAGE = (
    "You are a wonderful news writer. You assist readers by providing more detailed and "
    "useful information about the articles. User inputs the specific category for a news "
    "article using the format 'The news category is {category}'. Please provide a detailed "
    "explanation, in about 50 words, **in English**, on the category of the articles entered "
    "(such as politics, economics, sports, etc.). Please avoid using symbols such as double "
    "quotes (\") and single quotes ('), asterisks (*), and similar for emphasis as much as "
    "possible."
)

USER_TEMPLATE = "The news category is {key}"


def count_words(text: str) -> int:
    return len(text.split())


class PromptPair(BaseModel):
    system_message: str
    user_message: str

    @property
    def fingerprint(self) -> str:
        """sha256 over both messages; stable across processes."""
        digest = hashlib.sha256()
        digest.update(self.system_message.encode("utf-8"))
        digest.update(b"\x00")
        digest.update(self.user_message.encode("utf-8"))
        return digest.hexdigest()


class CategoryDescription(BaseModel):
    """Generated text for one category key with provenance."""

    key: str = Field(min_length=1)
    text: str = Field(min_length=1)
    generator_model: str
    prompt_fingerprint: str
    word_count: int = Field(ge=1)

    @model_validator(mode="before")
    @classmethod
    def fill_word_count(cls, data):
        if isinstance(data, dict) and data.get("word_count") is None and data.get("text"):
            data = {**data, "word_count": count_words(data["text"])}
        return data

    @model_validator(mode="after")
    def check_word_count(self) -> "CategoryDescription":
        if not self.text.strip():
            raise ValueError("description text must be non-empty")
        if self.word_count != count_words(self.text):
            raise ValueError(
                f"word_count {self.word_count} does not match text ({count_words(self.text)})"
            )
        return self

    def to_cache_entry(self) -> dict:
        return self.model_dump(exclude={"key"})
