"""Application configuration using Pydantic Settings."""
import os
from functools import lru_cache
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime settings loaded from environment variables.

    Experiment hyperparameters are not here; they live in ``ModelConfig``
    and travel with every checkpoint.
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging
    log_level: str = Field(default="INFO", alias="LOG_LEVEL")

    # LLM description generation
    llm_provider: str = Field(default="openai", alias="LLM_PROVIDER")
    llm_base_url: str = Field(default="https://api.openai.com/v1", alias="LLM_BASE_URL")
    llm_model: str = Field(default="gpt-4", alias="LLM_MODEL")
    llm_api_key_env: str = Field(default="OPENAI_API_KEY", alias="LLM_API_KEY_ENV")
    llm_temperature: float = Field(default=0.0, ge=0.0, le=2.0, alias="LLM_TEMPERATURE")
    llm_max_tokens: int = Field(default=256, ge=1, alias="LLM_MAX_TOKENS")
    llm_timeout: int = Field(default=120, alias="LLM_TIMEOUT")
    llm_max_attempts: int = Field(default=3, ge=1, alias="LLM_MAX_ATTEMPTS")
    llm_backoff_base: float = Field(default=1.0, ge=0.0, alias="LLM_BACKOFF_BASE")
    llm_concurrency: int = Field(default=4, ge=1, alias="LLM_CONCURRENCY")

    # Rate Limiting
    rate_limit_requests: int = Field(default=60, ge=1, alias="RATE_LIMIT_REQUESTS")
    rate_limit_window: int = Field(default=60, ge=1, alias="RATE_LIMIT_WINDOW")

    # AWS (Bedrock provider)
    aws_region: str = Field(default="us-west-2", alias="AWS_REGION")
    bedrock_endpoint_url: Optional[str] = Field(default=None, alias="BEDROCK_ENDPOINT_URL")
    bedrock_model_id: str = Field(
        default="us.anthropic.claude-3-5-haiku-20241022-v1:0", alias="BEDROCK_MODEL_ID"
    )

    # Pretrained encoders
    hf_cache_dir: Optional[str] = Field(default=None, alias="HF_CACHE_DIR")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        valid = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        v = v.upper()
        if v not in valid:
            raise ValueError(f"Log level must be one of {valid}")
        return v

    @field_validator("llm_provider")
    @classmethod
    def validate_llm_provider(cls, v: str) -> str:
        valid = ["openai", "bedrock"]
        v = v.lower()
        if v not in valid:
            raise ValueError(f"LLM provider must be one of {valid}")
        return v

    def llm_api_key(self) -> Optional[str]:
        """Read the credential from the configured variable; never cached on the model."""
        return os.environ.get(self.llm_api_key_env) or None


@lru_cache()
def get_settings() -> Settings:
    return Settings()


settings = get_settings()
