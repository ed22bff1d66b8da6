"""Natural language -> validated skill plans."""

from .backends import (
    ExternalBackend,
    PlannerBackend,
    RuleBasedBackend,
    call_backend,
    external_backend_from_env,
)
from .catalog import FunctionCatalog, build_catalog
from .compiler import CompileResult, compile_command
from .extract import extract_plan
from .grammar import SUPPORTED_VERBS, RuleGrammar
from .prompt import build_prompt, build_retry_prompt, load_template
from .types import Plan, Provenance, SkillCall, ValidationReport, Violation
from .validate import validate_plan

__all__ = [
    "ExternalBackend",
    "PlannerBackend",
    "RuleBasedBackend",
    "call_backend",
    "external_backend_from_env",
    "FunctionCatalog",
    "build_catalog",
    "CompileResult",
    "compile_command",
    "extract_plan",
    "SUPPORTED_VERBS",
    "RuleGrammar",
    "build_prompt",
    "build_retry_prompt",
    "load_template",
    "Plan",
    "Provenance",
    "SkillCall",
    "ValidationReport",
    "Violation",
    "validate_plan",
]
