"""Grounded answer generation over retrieved documents.

A fixed prompt template carries the retrieved context plus recent
conversation turns.  Providers are pluggable: a deterministic local
extractive model for offline use, or a remote chat-completion endpoint.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Optional, Protocol, Sequence

import httpx

from .errors import EmptyQuestion, PromptTooLarge, ProviderFailure
from .ranking import tokenize

PROMPT_TEMPLATE = (
    "Provide your answers only on the knowledge provided here. "
    "Do not use any outside knowledge.\n"
    "If you don't know the answer, say that you don't know. "
    "Don't try to make up an answer.\n"
    "\n"
    "Given the following context, answer the below question:\n"
    "\n"
    "{context}\n"
    "Question: {question}\n"
    "Helpful Answer:"
)

_CONTEXT_HEADER = "Given the following context, answer the below question:\n\n"

IDK_ANSWER = "I don't know."

#: Budget for the rendered context region, in characters.
MAX_CONTEXT_CHARS = 24000

MAX_TURNS = 5


@dataclass
class ChatTurn:
    question: str
    answer: str


@dataclass
class ChatSession:
    """Conversation state; only the most recent turns are retained."""

    session_id: str
    turns: Deque[ChatTurn] = field(default_factory=lambda: deque(maxlen=MAX_TURNS))

    def append(self, question: str, answer: str):
        self.turns.append(ChatTurn(question=question, answer=answer))

    def history_payload(self) -> list[dict[str, str]]:
        return [{"question": t.question, "answer": t.answer} for t in self.turns]


def _history_block(turns: Sequence[ChatTurn]) -> str:
    lines = []
    for turn in turns:
        lines.append(f"Question: {turn.question}")
        lines.append(f"Answer: {turn.answer}")
    return "\n".join(lines)


def render_context(doc_texts: Sequence[str], turns: Sequence[ChatTurn]) -> str:
    parts = list(doc_texts)
    history = _history_block(turns)
    if history:
        parts.append(history)
    return "\n\n".join(parts)


def build_prompt(question: str, doc_texts: Sequence[str],
                 turns: Sequence[ChatTurn] = (),
                 max_context_chars: int = MAX_CONTEXT_CHARS) -> str:
    """Fill the template, shedding lowest-ranked documents to fit the budget.

    Documents arrive in rank order and are dropped from the tail first;
    history is never dropped.  Raises PromptTooLarge when the context
    cannot fit even with every document removed.
    """
    docs = list(doc_texts)
    while True:
        context = render_context(docs, turns)
        if len(context) <= max_context_chars:
            break
        if not docs:
            raise PromptTooLarge(
                f"context is {len(context)} chars with no documents left to drop "
                f"(budget {max_context_chars})")
        docs.pop()
    return PROMPT_TEMPLATE.format(context=context, question=question)


class LlmProvider(Protocol):
    def generate(self, prompt: str) -> str:
        """Produce an answer for a fully rendered prompt."""


_SENTENCE = re.compile(r"[^.]*\.|[^.]+$")


def _sentences(region: str) -> list[str]:
    found = []
    for line in region.split("\n"):
        for part in _SENTENCE.findall(line):
            stripped = part.strip()
            if stripped:
                found.append(stripped)
    return found


class ExtractiveLlm:
    """Offline provider: answer with the best-overlapping context sentence.

    The context region is parsed back out of the prompt, split into
    sentences, and scored by unigram overlap with the question.  Ties go
    to the earliest sentence; zero overlap yields the refusal string.
    """

    def generate(self, prompt: str) -> str:
        header_at = prompt.find(_CONTEXT_HEADER)
        if header_at < 0:
            return IDK_ANSWER
        region_start = header_at + len(_CONTEXT_HEADER)
        question_at = prompt.rfind("\nQuestion: ")
        if question_at < 0 or question_at < region_start:
            return IDK_ANSWER
        region = prompt[region_start:question_at]
        tail = prompt[question_at + len("\nQuestion: "):]
        question = tail.split("\nHelpful Answer:", 1)[0]

        question_tokens = set(tokenize(question))
        best_sentence = None
        best_overlap = 0
        for sentence in _sentences(region):
            overlap = len(question_tokens & set(tokenize(sentence)))
            if overlap > best_overlap:
                best_overlap = overlap
                best_sentence = sentence
        if best_sentence is None:
            return IDK_ANSWER
        return best_sentence


_CONTEXT_LENGTH_HINTS = ("context_length", "context length", "maximum context",
                         "too many tokens", "prompt is too long")


class RemoteLlm:
    """Chat-completion provider over HTTP with temperature pinned to 0."""

    def __init__(self, endpoint: str, model: str, api_key: Optional[str] = None,
                 timeout: float = 60.0, client: Optional[httpx.Client] = None):
        self.endpoint = endpoint
        self.model = model
        self.api_key = api_key
        self.timeout = timeout
        self._client = client

    def generate(self, prompt: str) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        }
        try:
            if self._client is not None:
                response = self._client.post(self.endpoint, json=payload,
                                             headers=headers, timeout=self.timeout)
            else:
                response = httpx.post(self.endpoint, json=payload,
                                      headers=headers, timeout=self.timeout)
        except httpx.HTTPError as exc:
            raise ProviderFailure(f"generation request failed: {exc}") from exc
        if response.status_code == 413:
            raise PromptTooLarge("provider rejected the prompt as too large")
        if response.status_code >= 400:
            body = response.text[:500]
            if any(hint in body.lower() for hint in _CONTEXT_LENGTH_HINTS):
                raise PromptTooLarge(f"provider rejected the prompt: {body}")
            raise ProviderFailure(f"provider returned {response.status_code}: {body}")
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ProviderFailure(f"malformed completion response: {exc}") from exc


def answer(question: str, doc_texts: Sequence[str], session: ChatSession,
           provider: LlmProvider,
           max_context_chars: int = MAX_CONTEXT_CHARS) -> str:
    """Run one turn; history is extended only after the provider succeeds."""
    clean = question.strip()
    if not clean:
        raise EmptyQuestion("question must be nonempty")
    prompt = build_prompt(clean, doc_texts, list(session.turns), max_context_chars)
    text = provider.generate(prompt)
    session.append(clean, text)
    return text
