"""Language-model and embedding providers.

Ships two deterministic local providers — a rule-table mock for completions
and a hashed character-3-gram embedder — plus an HTTP client for a generic
chat-completion endpoint.  The mock is a pure function of the prompt text:
it recognizes the template markers the prompting module emits, extracts the
labeled sections, and applies fixed rules, so the whole pipeline runs
offline and byte-reproducibly.
"""

from __future__ import annotations

import re
import threading
import zlib
from dataclasses import dataclass
from typing import Protocol

import httpx
import numpy as np

from .errors import EmptyCompletion, EmptyText, ProviderUnavailable
from .textutils import content_tokens, split_sentences, tokens, words_match

DEFAULT_DIMENSION = 256
DEFAULT_TIMEOUT = 30.0
DEFAULT_MAX_CONCURRENCY = 4


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    max_length_hint: int = 512
    temperature: float = 0.0

    def __post_init__(self):
        if not self.prompt.strip():
            raise ValueError("prompt must be non-empty")
        if self.max_length_hint <= 0:
            raise ValueError("max_length_hint must be positive")
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")


class LanguageModel(Protocol):
    def complete(self, request: CompletionRequest) -> str: ...


class Embedder(Protocol):
    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


# Mock completion ------------------------------------------------------------

_TASK_MARKER = re.compile(r"^\[task: ([a-z-]+)\]", re.MULTILINE)
_TRANSITION_LINE = re.compile(
    r"^(\d+)\. \[([^\]]+)\] (\S+) -> (\S+) \| when (.*?) \| do (.*?) \| (.*)$",
    re.MULTILINE,
)

_EPISODIC_OPENERS = ("how do i ", "how do we ", "how can i ", "how would i ")


def _labeled_value(prompt: str, label: str) -> str:
    for line in prompt.splitlines():
        if line.startswith(label):
            return line[len(label):].strip()
    return ""


def _labeled_values(prompt: str, label: str) -> list[str]:
    return [
        line[len(label):].strip()
        for line in prompt.splitlines()
        if line.startswith(label)
    ]


def _section(prompt: str, open_prefix: str, close_line: str) -> str:
    lines = prompt.splitlines()
    collected: list[str] = []
    inside = False
    for line in lines:
        if not inside and line.startswith(open_prefix):
            inside = True
            continue
        if inside:
            if line.strip() == close_line:
                break
            collected.append(line)
    return "\n".join(collected).strip()


def _mentions_any(question: str, names: list[str]) -> bool:
    q_tokens = content_tokens(question)
    for name in names:
        for name_token in content_tokens(name):
            if any(words_match(q, name_token) for q in q_tokens):
                return True
    return False


def _split_names(lines: list[str]) -> list[str]:
    names: list[str] = []
    for line in lines:
        names.extend(part.strip() for part in line.split(";") if part.strip())
    return names


def _best_sentence(question: str, text: str) -> str:
    """Sentence with the most question content tokens (lenient match);
    earliest wins ties; first sentence when nothing overlaps."""
    sentences = split_sentences(text)
    if not sentences:
        return text.strip()
    q_tokens = content_tokens(question)
    best, best_score = sentences[0], -1
    for sentence in sentences:
        s_tokens = tokens(sentence)
        score = sum(
            1 for q in q_tokens if any(words_match(q, s) for s in s_tokens)
        )
        if score > best_score:
            best, best_score = sentence, score
    return best


class MockLanguageModel:
    """Deterministic stand-in for a remote model.

    Each prompt template opens with a "[task: ...]" marker; the rules below
    key off that marker.  Prompts without a marker fall back to echoing
    their first sentence.
    """

    def complete(self, request: CompletionRequest) -> str:
        prompt = request.prompt
        marker = _TASK_MARKER.search(prompt)
        kind = marker.group(1) if marker else None
        if kind == "classify-memory":
            text = self._memory_kind(_labeled_value(prompt, "Question: "))
        elif kind == "classify-category":
            text = self._category(prompt)
        elif kind == "k-score":
            text = self._k_score(_labeled_value(prompt, "Question: "))
        elif kind == "initial-answer":
            text = self._initial(prompt)
        elif kind == "refine-answer":
            text = self._refine(prompt)
        elif kind == "cot-transitions":
            text = self._walkthrough(prompt)
        else:
            sentences = split_sentences(prompt)
            text = sentences[0] if sentences else prompt.strip()
        if not text.strip():
            raise EmptyCompletion("mock produced no text")
        return text

    @staticmethod
    def _memory_kind(question: str) -> str:
        q = question.strip().lower()
        if (
            q.startswith(_EPISODIC_OPENERS)
            or "process to achieve" in q
            or q.startswith("what happens")
        ):
            return "Episodic"
        return "Semantic"

    @staticmethod
    def _category(prompt: str) -> str:
        question = _labeled_value(prompt, "Question: ")
        knowledge = _split_names(_labeled_values(prompt, "Knowledge names:"))
        procedural = _split_names(_labeled_values(prompt, "Task names:"))
        in_knowledge = _mentions_any(question, knowledge)
        in_procedural = _mentions_any(question, procedural)
        if in_knowledge and in_procedural:
            return "MultiModel"
        if in_knowledge:
            return "KnowledgeModel"
        if in_procedural:
            return "MethodTaskModel"
        return "Irrelevant"

    @staticmethod
    def _k_score(question: str) -> str:
        q = question.strip().lower()
        if "compare" in q or "discuss" in q or "in detail" in q:
            return "4"
        if "explain" in q or q.startswith("why") or " why " in q or q.startswith(("how does", "how do")):
            return "3"
        if q.startswith(("list", "name")):
            return "1"
        return "2"

    @staticmethod
    def _initial(prompt: str) -> str:
        question = _labeled_value(prompt, "Question: ")
        context = _section(prompt, "Context (", "--- end context ---")
        return _best_sentence(question, context)

    @staticmethod
    def _refine(prompt: str) -> str:
        question = _labeled_value(prompt, "Question: ")
        draft = _section(prompt, "Initial Response:", "--- end response ---")
        first_line = _labeled_value(prompt, "Initial Response: ")
        if first_line:
            draft = (first_line + "\n" + draft).strip()
        context = _section(prompt, "Additional Context (", "--- end context ---")
        known = content_tokens(draft) | content_tokens(question)
        for sentence in split_sentences(context):
            if sentence in draft:
                continue
            overlap = any(
                words_match(s, k)
                for s in content_tokens(sentence)
                for k in known
            )
            if overlap:
                # New evidence broadens the draft: drop the hedging
                # quantifier and append the supplementary sentence.
                merged = draft.replace("one of the ", "").rstrip()
                return merged + " " + sentence
        return draft

    @staticmethod
    def _walkthrough(prompt: str) -> str:
        # In-context examples contain their own Task/Transitions sections;
        # the question's sections come last, so take the final occurrences.
        task_names = _labeled_values(prompt, "Task: ")
        task_name = task_names[-1] if task_names else ""
        verbosities = _labeled_values(prompt, "Expected verbosity: ")
        verbosity = verbosities[-1] if verbosities else ""
        tail = prompt[prompt.rfind("\nTransitions:\n"):]
        steps = _TRANSITION_LINE.findall(tail)
        if not steps:
            return f"{task_name}."
        if "3-5 words" in verbosity:
            return f"{task_name}."
        if "few sentences" in verbosity:
            first_desc = steps[0][6]
            return (
                f"The method achieves '{task_name}' in {len(steps)} steps, "
                f"beginning as follows: {first_desc}"
            )
        intro = f"The goal is: {task_name}."
        if "multiple paragraphs" in verbosity:
            paragraphs = [intro]
            for n, (_, _, _, _, condition, _, desc) in enumerate(steps, start=1):
                paragraphs.append(f"Step {n}: {desc} This step applies when {condition}.")
            return "\n\n".join(paragraphs)
        sentences = [intro]
        for n, step in enumerate(steps, start=1):
            sentences.append(f"Step {n}: {step[6]}")
        return " ".join(sentences)


# Embedding ------------------------------------------------------------------

def _grams(token: str) -> list[str]:
    # Tokens shorter than the gram size stand as their own gram.
    if len(token) <= 3:
        return [token]
    return [token[i:i + 3] for i in range(len(token) - 2)]


class HashedNgramEmbedder:
    """Character-3-gram hashing into a fixed number of buckets.

    Deterministic and dependency-free: lowercase tokens, slide a 3-character
    window, hash each gram with crc32 into one of ``dimension`` buckets, and
    count.  Raw counts; cosine normalization happens at similarity time.
    """

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        self.dimension = dimension

    def embed(self, text: str) -> np.ndarray:
        if not text.strip():
            raise EmptyText("cannot embed empty text")
        vector = np.zeros(self.dimension, dtype=np.float64)
        for token in tokens(text):
            for gram in _grams(token):
                bucket = zlib.crc32(gram.encode("utf-8")) % self.dimension
                vector[bucket] += 1.0
        return vector


# Remote client --------------------------------------------------------------

class RemoteLanguageModel:
    """Client for a generic bearer-authenticated chat-completion endpoint."""

    def __init__(
        self,
        base_url: str,
        api_key: str,
        model: str,
        timeout: float = DEFAULT_TIMEOUT,
        max_concurrency: int = DEFAULT_MAX_CONCURRENCY,
        transport: httpx.BaseTransport | None = None,
    ):
        self.model = model
        self._client = httpx.Client(
            base_url=base_url,
            timeout=timeout,
            headers={"Authorization": f"Bearer {api_key}"},
            transport=transport,
        )
        self._gate = threading.BoundedSemaphore(max_concurrency)

    def complete(self, request: CompletionRequest) -> str:
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.temperature,
            "max_tokens": request.max_length_hint,
        }
        with self._gate:
            try:
                response = self._client.post("/chat/completions", json=payload)
                response.raise_for_status()
            except httpx.HTTPError as exc:
                raise ProviderUnavailable(str(exc)) from exc
        try:
            text = response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ProviderUnavailable(f"malformed completion response: {exc}") from exc
        if not isinstance(text, str) or not text.strip():
            raise EmptyCompletion("remote model returned no text")
        return text

    def close(self) -> None:
        self._client.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()
