"""Prompt rendering for external language-model backends.

The template is a single versioned file shipped with the package; rendering
is a pure string substitution, so identical inputs produce identical bytes.
"""

from __future__ import annotations

from importlib import resources

from .catalog import FunctionCatalog

_TEMPLATE_RESOURCE = "prompt_template.txt"


def load_template(path=None) -> str:
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    return (resources.files(__package__) / _TEMPLATE_RESOURCE).read_text(encoding="utf-8")


def build_prompt(
    catalog: FunctionCatalog,
    user_text: str,
    world_summary: str = "",
    template: str | None = None,
) -> str:
    tpl = template if template is not None else load_template()
    catalog_text = catalog.manifest_json() if catalog.entries else "(no functions available)"

    def render(values) -> str:
        return ", ".join(str(v) for v in values) if values else "(none)"

    summary = f"\nWorld summary: {world_summary}\n" if world_summary else ""
    return (
        tpl.replace("<<CATALOG>>", catalog_text)
        .replace("<<LOCATIONS>>", render(catalog.registries.get("locations", [])))
        .replace("<<ITEMS>>", render(catalog.registries.get("items", [])))
        .replace("<<MARKERS>>", render(catalog.registries.get("markers", [])))
        .replace("<<WORLD_SUMMARY>>", summary)
        .replace("<<COMMAND>>", user_text)
    )


def build_retry_prompt(base_prompt: str, previous_output: str, violations: str) -> str:
    return (
        f"{base_prompt.rstrip()}\n\n"
        f"Your previous plan was rejected by the safety validator:\n{violations}\n"
        f"Previous output:\n{previous_output}\n"
        "Respond again with ONLY a corrected JSON plan.\nPlan:\n"
    )
