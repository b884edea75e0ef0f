"""Prompt template loading and rendering.

Templates ship with the package as plain text files; rendering is literal
placeholder substitution ({name} replaced verbatim), so braces occurring in
substituted values never re-trigger formatting.
"""

from __future__ import annotations

from functools import lru_cache
from importlib.resources import files

# k-score verbosity scale: the instruction injected into prompts per level.
VERBOSITY = {
    1: "a very brief response (3-5 words)",
    2: "a short response of a few sentences",
    3: "a more detailed paragraph-length response",
    4: "a comprehensive response spanning multiple paragraphs",
}


@lru_cache(maxsize=None)
def load_template(template_name: str) -> str:
    """Template text by file name relative to the prompts directory,
    e.g. "initial.txt" or "doc_templates/knowledge.txt"."""
    resource = files("ivy") / "prompts" / template_name
    return resource.read_text(encoding="utf-8")


def fill(template: str, **values) -> str:
    for key, value in values.items():
        template = template.replace("{" + key + "}", str(value))
    return template


def render(template_name: str, **values) -> str:
    return fill(load_template(template_name), **values)
