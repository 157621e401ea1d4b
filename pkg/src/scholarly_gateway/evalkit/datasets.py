"""QA dataset builders.

Two dataset flavors: cluster-driven questions produced by a generation
provider over k-means groupings of the knowledge base, and templated
questions derived from curated paper comparisons.
"""

from __future__ import annotations

import ast
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import MalformedGeneration
from ..generator import LlmProvider
from ..retriever import KnowledgeBase
from .clustering import DEFAULT_SEED, kmeans, plan_clusters

logger = logging.getLogger(__name__)

AI_QA_PROMPT = (
    "The task is to generate questions based on the provided information.\n"
    "Given a list of texts, generate only two questions, no more than two.\n"
    "Make questions variant.\n"
    "The questions should imitate what a user might look for in the given documents.\n"
    "\n"
    "Return questions as a Python list.\n"
    "\n"
    "Documents:\n"
    "{documents}"
)

COMPARISON_QUESTION = 'In the paper "{paper}", what is the {property}?'


@dataclass
class QaItem:
    question: str
    ground_truth: str
    source: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.question.strip():
            raise ValueError("question must be nonempty")
        if not self.ground_truth.strip():
            raise ValueError("ground_truth must be nonempty")
        if self.source not in ("ai_qa", "comparison_qa"):
            raise ValueError(f"unknown source {self.source!r}")


@dataclass
class ComparisonPaper:
    title: str
    properties: dict[str, str]


@dataclass
class Comparison:
    title: str
    papers: list[ComparisonPaper]

    @classmethod
    def from_dict(cls, raw: dict) -> "Comparison":
        papers = [ComparisonPaper(title=p["title"], properties=dict(p.get("properties", {})))
                  for p in raw.get("papers", [])]
        if not papers:
            raise ValueError(f"comparison {raw.get('title')!r} has no papers")
        return cls(title=raw.get("title", ""), papers=papers)


def parse_question_list(reply: str) -> list[str]:
    """Parse a provider reply as a bracketed two-question Python list."""
    text = reply.strip()
    start, end = text.find("["), text.rfind("]")
    if start >= 0 and end > start:
        text = text[start:end + 1]
    try:
        parsed = ast.literal_eval(text)
    except (ValueError, SyntaxError) as exc:
        raise MalformedGeneration(f"reply is not a Python list: {reply[:200]!r}") from exc
    if not isinstance(parsed, list) or len(parsed) != 2:
        raise MalformedGeneration(f"expected exactly two questions, got {parsed!r}")
    questions = []
    for entry in parsed:
        if not isinstance(entry, str) or not entry.strip():
            raise MalformedGeneration(f"non-string or empty question in {parsed!r}")
        questions.append(entry.strip())
    return questions


def build_ai_qa(kb: KnowledgeBase, llm_provider: LlmProvider,
                seed: int = DEFAULT_SEED) -> list[QaItem]:
    """Two generated questions per embedding cluster.

    Small knowledge bases are skipped per the cluster-count rule; a
    malformed provider reply skips only that cluster.
    """
    plan = plan_clusters(len(kb))
    if plan.k is None:
        return []
    result = kmeans(kb.embeddings, plan.k, seed=seed)
    items: list[QaItem] = []
    for cluster_id in range(plan.k):
        texts = [doc.text for doc, label in zip(kb.documents, result.labels)
                 if label == cluster_id]
        if not texts:
            continue
        documents = "\n\n".join(texts)
        prompt = AI_QA_PROMPT.format(documents=documents)
        reply = llm_provider.generate(prompt)
        try:
            questions = parse_question_list(reply)
        except MalformedGeneration as exc:
            logger.warning("cluster %d: %s", cluster_id, exc)
            continue
        for question in questions:
            items.append(QaItem(question=question, ground_truth=documents,
                                source="ai_qa", meta={"cluster": cluster_id}))
    return items


class StubQuestionLlm:
    """Offline generation provider for the AI-QA builder.

    Emits two templated questions about the first titled document in the
    prompt, rendered as a Python list literal so the parser accepts it.
    """

    def generate(self, prompt: str) -> str:
        topic = "these documents"
        for line in prompt.splitlines():
            if line.startswith("title: "):
                topic = line[len("title: "):].strip() or topic
                break
        return str([f"What is {topic} about?",
                    f"Which work discusses {topic}?"])


def _normalize_title(title: str) -> str:
    return " ".join(title.lower().split())


def build_comparison_qa(comparisons: Sequence[Comparison],
                        retrieved_titles: Iterable[str]) -> list[QaItem]:
    """One templated question per property of each retrieved paper.

    Title matching is case-insensitive and whitespace-normalized; papers
    absent from the retrieved set and empty property values contribute
    nothing.
    """
    retrieved = {_normalize_title(t) for t in retrieved_titles}
    items: list[QaItem] = []
    for comparison in comparisons:
        for paper in comparison.papers:
            if _normalize_title(paper.title) not in retrieved:
                continue
            for name, value in paper.properties.items():
                if not name.strip() or not str(value).strip():
                    continue
                question = COMPARISON_QUESTION.format(paper=paper.title, property=name)
                items.append(QaItem(question=question, ground_truth=str(value),
                                    source="comparison_qa",
                                    meta={"comparison": comparison.title,
                                          "paper": paper.title, "property": name}))
    return items


def load_comparisons(path: str | Path) -> list[Comparison]:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(raw, dict):
        raw = [raw]
    return [Comparison.from_dict(entry) for entry in raw]


def save_items(items: Sequence[QaItem], path: str | Path):
    """One JSON object per line."""
    with open(path, "w", encoding="utf-8") as handle:
        for item in items:
            handle.write(json.dumps({
                "question": item.question,
                "ground_truth": item.ground_truth,
                "source": item.source,
                "meta": item.meta,
            }, ensure_ascii=False) + "\n")


def load_items(path: str | Path) -> list[QaItem]:
    items = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            raw = json.loads(line)
            items.append(QaItem(question=raw["question"], ground_truth=raw["ground_truth"],
                                source=raw["source"], meta=raw.get("meta", {})))
    return items
