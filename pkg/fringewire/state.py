from typing import Any, Optional, TypedDict

from .config import RunConfig


class RunState(TypedDict, total=False):
    scenario: str                     # Positional scenario name from the command line
    raw_config: dict[str, Any]        # Merged raw key/value pairs (file + flags)
    config: Optional[RunConfig]       # Output from validate
    results: dict[str, Any]           # Output from simulate (JSON "results")
    columns: list[str]                # CSV header
    rows: list[list[Any]]             # CSV body
    checks: dict[str, bool]           # Physical checks from check
    violations: list[str]             # Names of failed checks
    error: Optional[str]              # Validation / simulation failure message
    exit_code: int                    # 0 ok, 1 invalid input, 2 physical violation
    rendered: str                     # Serialized output, set by emit
