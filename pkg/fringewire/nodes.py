import logging
import sys

from pydantic import ValidationError

from .commands import COMMANDS
from .config import STDOUT, build_config
from .errors import FringewireError
from .serialize import render_csv, render_json, write_atomic
from .state import RunState

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_VIOLATION = 2


# ─────────────────────────────────────────────────────────────────────────────
# Step 1 – Validate
# ─────────────────────────────────────────────────────────────────────────────

def validate_node(state: RunState) -> dict:
    """Build the RunConfig from the merged keys before any computation."""
    try:
        config = build_config(state["scenario"], state.get("raw_config", {}))
    except FringewireError as exc:
        log.error("Invalid configuration: %s", exc)
        return {"config": None, "error": str(exc), "exit_code": EXIT_INVALID}

    log.info("Validated %s run (seed=%d)", config.scenario, config.seed)
    return {"config": config, "error": None}


# ─────────────────────────────────────────────────────────────────────────────
# Step 2 – Simulate
# ─────────────────────────────────────────────────────────────────────────────

def simulate_node(state: RunState) -> dict:
    config = state["config"]
    command = COMMANDS[config.scenario]
    log.info("Running scenario %s", config.scenario)
    try:
        output = command(config)
    except (FringewireError, ValidationError, ValueError) as exc:
        log.error("Scenario %s failed: %s", config.scenario, exc)
        return {"error": str(exc), "exit_code": EXIT_INVALID}

    return {
        "results": output.results,
        "columns": output.columns,
        "rows": output.rows,
        "checks": output.checks,
    }


# ─────────────────────────────────────────────────────────────────────────────
# Step 3 – Check
# ─────────────────────────────────────────────────────────────────────────────

def check_node(state: RunState) -> dict:
    failed = [name for name, ok in state.get("checks", {}).items() if not ok]
    return {"violations": failed}


def violation_node(state: RunState) -> dict:
    """Physical invariants failed: keep the output, flag the run."""
    for name in state["violations"]:
        log.error("Physical check failed: %s", name)
    return {"exit_code": EXIT_VIOLATION}


# ─────────────────────────────────────────────────────────────────────────────
# Step 4 – Emit
# ─────────────────────────────────────────────────────────────────────────────

def emit_node(state: RunState) -> dict:
    config = state["config"]
    if config.output_format == "csv":
        text = render_csv(state["columns"], state["rows"])
    else:
        text = render_json({
            "scenario": config.scenario,
            "config_echo": config.model_dump(mode="json"),
            "results": state["results"],
            "checks": state["checks"],
        })

    if config.output_path == STDOUT:
        sys.stdout.write(text)
    else:
        write_atomic(config.output_path, text)
        log.info("Wrote %s output to %s", config.output_format, config.output_path)

    return {"rendered": text, "exit_code": state.get("exit_code", EXIT_OK)}
