"""LLM backends that turn a PromptPair into description text."""
import asyncio
import json
import logging
from pathlib import Path
from typing import Dict, Optional, Protocol, Union

import boto3
import httpx
from botocore.config import Config
from botocore.exceptions import BotoCoreError, ClientError

from newsrec.core.config import Settings, settings
from newsrec.core.exceptions import ConfigurationError, LlmClientError
from newsrec.schemas.chat import ChatCompletionRequest, ChatCompletionResponse, Message
from newsrec.schemas.descriptions import USER_TEMPLATE, PromptPair

logger = logging.getLogger(__name__)

TRANSIENT_STATUS = {408, 409, 429}
TRANSIENT_BEDROCK_CODES = {
    "ThrottlingException",
    "ModelNotReadyException",
    "ServiceUnavailableException",
    "InternalServerException",
    "ModelTimeoutException",
}


class LlmClient(Protocol):
    """Anything that can answer one prompt."""

    model_name: str

    async def complete(self, prompt: PromptPair) -> str: ...


class ChatCompletionsClient:
    """OpenAI-compatible ``/chat/completions`` over HTTP."""

    def __init__(
        self,
        api_key: str,
        model: str,
        base_url: str = "https://api.openai.com/v1",
        temperature: float = 0.0,
        max_tokens: int = 256,
        timeout: float = 120,
        transport: Optional[httpx.AsyncBaseTransport] = None,
    ):
        self.model_name = model
        self.temperature = temperature
        self.max_tokens = max_tokens
        self._client = httpx.AsyncClient(
            base_url=base_url.rstrip("/"),
            headers={"Authorization": f"Bearer {api_key}", "Content-Type": "application/json"},
            timeout=timeout,
            transport=transport,
        )

    async def complete(self, prompt: PromptPair) -> str:
        request = ChatCompletionRequest(
            model=self.model_name,
            messages=[
                Message(role="system", content=prompt.system_message),
                Message(role="user", content=prompt.user_message),
            ],
            max_tokens=self.max_tokens,
            temperature=self.temperature,
        )
        try:
            resp = await self._client.post("/chat/completions", json=request.model_dump())
        except httpx.TimeoutException as e:
            raise LlmClientError(f"Chat completion timed out: {e}", transient=True, code="timeout")
        except httpx.TransportError as e:
            raise LlmClientError(f"Chat completion transport error: {e}", transient=True)

        if resp.status_code != 200:
            transient = resp.status_code in TRANSIENT_STATUS or resp.status_code >= 500
            raise LlmClientError(
                f"Chat completion failed with HTTP {resp.status_code}: {resp.text[:200]}",
                transient=transient,
                code=f"http_{resp.status_code}",
            )
        try:
            completion = ChatCompletionResponse.model_validate(resp.json())
        except (ValueError, json.JSONDecodeError) as e:
            raise LlmClientError(f"Malformed chat completion response: {e}")
        return completion.text or ""

    async def aclose(self) -> None:
        await self._client.aclose()


class BedrockClient:
    """Amazon Bedrock Converse API."""

    def __init__(
        self,
        model_id: str,
        region: str,
        endpoint_url: Optional[str] = None,
        temperature: float = 0.0,
        max_tokens: int = 256,
        timeout: int = 120,
        client=None,
    ):
        self.model_name = model_id
        self.temperature = temperature
        self.max_tokens = max_tokens
        if client is None:
            client_kwargs = {
                "service_name": "bedrock-runtime",
                "region_name": region,
                # Retries are owned by the description service.
                "config": Config(read_timeout=timeout, connect_timeout=30, retries={"max_attempts": 1}),
            }
            if endpoint_url:
                client_kwargs["endpoint_url"] = endpoint_url
            client = boto3.client(**client_kwargs)
        self.client = client

    def _converse(self, prompt: PromptPair) -> str:
        response = self.client.converse(
            modelId=self.model_name,
            system=[{"text": prompt.system_message}],
            messages=[{"role": "user", "content": [{"text": prompt.user_message}]}],
            inferenceConfig={"temperature": self.temperature, "maxTokens": self.max_tokens},
        )
        blocks = response.get("output", {}).get("message", {}).get("content", [])
        return "".join(block.get("text", "") for block in blocks)

    async def complete(self, prompt: PromptPair) -> str:
        try:
            return await asyncio.to_thread(self._converse, prompt)
        except ClientError as e:
            code = e.response.get("Error", {}).get("Code", "bedrock_error")
            raise LlmClientError(
                f"Bedrock error: {e}", transient=code in TRANSIENT_BEDROCK_CODES, code=code
            )
        except BotoCoreError as e:
            raise LlmClientError(f"Bedrock error: {e}", transient=True)

    async def aclose(self) -> None:
        return None


class FixtureClient:
    """Serves descriptions from a local JSON object ``key -> text``."""

    def __init__(self, fixtures: Union[Dict[str, str], str, Path], model_name: Optional[str] = None):
        if isinstance(fixtures, (str, Path)):
            path = Path(fixtures)
            try:
                fixtures = json.loads(path.read_text(encoding="utf-8"))
            except FileNotFoundError:
                raise ConfigurationError(f"Fixture file not found: {path}", param="fixture")
            model_name = model_name or f"fixture:{path.name}"
        self.fixtures: Dict[str, str] = dict(fixtures)
        self.model_name = model_name or "fixture"
        self.call_count = 0

    async def complete(self, prompt: PromptPair) -> str:
        self.call_count += 1
        prefix = USER_TEMPLATE.format(key="")
        key = prompt.user_message.removeprefix(prefix)
        if key not in self.fixtures:
            raise LlmClientError(f"Fixture has no description for '{key}'", code="fixture_missing")
        return self.fixtures[key]

    async def aclose(self) -> None:
        return None


def build_llm_client(
    fixture: Optional[Union[str, Path]] = None, config: Optional[Settings] = None
) -> LlmClient:
    """Fixture client when a fixture is given, else the configured live provider."""
    config = config or settings
    if fixture is not None:
        return FixtureClient(fixture)
    if config.llm_provider == "bedrock":
        return BedrockClient(
            model_id=config.bedrock_model_id,
            region=config.aws_region,
            endpoint_url=config.bedrock_endpoint_url,
            temperature=config.llm_temperature,
            max_tokens=config.llm_max_tokens,
            timeout=config.llm_timeout,
        )
    api_key = config.llm_api_key()
    if not api_key:
        raise ConfigurationError(
            f"No LLM credential: set {config.llm_api_key_env} or pass --fixture",
            param=config.llm_api_key_env,
        )
    return ChatCompletionsClient(
        api_key=api_key,
        model=config.llm_model,
        base_url=config.llm_base_url,
        temperature=config.llm_temperature,
        max_tokens=config.llm_max_tokens,
        timeout=config.llm_timeout,
    )
