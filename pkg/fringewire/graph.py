import logging

from langgraph.graph import END, StateGraph

from .nodes import check_node, emit_node, simulate_node, validate_node, violation_node
from .state import RunState

log = logging.getLogger(__name__)


# ─────────────────────────────────────────────────────────────────────────────
# Routing logic
# ─────────────────────────────────────────────────────────────────────────────

def route_on_error(state: RunState) -> str:
    """
    Conditional edge after validate and simulate: a recorded error ends the
    run before anything is written.
    """
    if state.get("error"):
        log.info("Error recorded → END")
        return "end"
    return "continue"


def route_checks(state: RunState) -> str:
    if state.get("violations"):
        log.info("%d check(s) failed → violation", len(state["violations"]))
        return "violation"
    return "emit"


# ─────────────────────────────────────────────────────────────────────────────
# Graph construction
# ─────────────────────────────────────────────────────────────────────────────

def create_graph():
    workflow = StateGraph(RunState)

    workflow.add_node("validate", validate_node)
    workflow.add_node("simulate", simulate_node)
    workflow.add_node("check", check_node)
    workflow.add_node("violation", violation_node)
    workflow.add_node("emit", emit_node)

    workflow.set_entry_point("validate")
    workflow.add_conditional_edges(
        "validate", route_on_error, {"end": END, "continue": "simulate"}
    )
    workflow.add_conditional_edges(
        "simulate", route_on_error, {"end": END, "continue": "check"}
    )
    workflow.add_conditional_edges(
        "check", route_checks, {"violation": "violation", "emit": "emit"}
    )
    # a violated run still writes its output so the failure can be inspected
    workflow.add_edge("violation", "emit")
    workflow.add_edge("emit", END)

    return workflow.compile()


# Module-level singleton, shared by every CLI invocation in the process.
graph = create_graph()
