import logging
import uuid
from datetime import datetime
from typing import Any, Dict, List, Optional

from langgraph.checkpoint.memory import MemorySaver
from langgraph.graph import END, StateGraph

from .criteria import resolve
from .global_state import cleanup_evaluation_cache
from .nodes import SuiteNodes
from .states import SuiteState

logger = logging.getLogger(__name__)


class SuiteGraph:
    """LangGraph pipeline running the acceptance criteria one node visit at a time"""

    def __init__(self):
        self.nodes = SuiteNodes()
        self.graph = self._create_graph()

    def _create_graph(self):
        workflow = StateGraph(SuiteState)

        workflow.add_node("plan", self.nodes.plan_node)
        workflow.add_node("run", self.nodes.run_node)
        workflow.add_node("review", self.nodes.review_node)
        workflow.add_node("report", self.nodes.report_node)

        workflow.set_entry_point("plan")
        workflow.add_edge("plan", "run")
        workflow.add_edge("run", "review")

        def should_continue(state: SuiteState) -> str:
            if state["current_index"] < len(state["plan"]):
                return "run"
            return "report" if state.get("report_path") else "end"

        workflow.add_conditional_edges("review", should_continue, {"run": "run", "report": "report", "end": END})
        workflow.add_edge("report", END)

        return workflow.compile(checkpointer=MemorySaver())

    def run_suite(self, only: Optional[List[str]] = None, tolerance: float = 1.0, seed: int = 0,
                  report_path: Optional[str] = None, session_id: Optional[str] = None) -> Dict[str, Any]:
        """
        Run the selected criteria. Unknown ids raise ConfigError before
        anything runs; failures inside a criterion are recorded, not raised.
        """
        only = list(only or [])
        plan = resolve(only)
        session_id = session_id or uuid.uuid4().hex
        logger.info(f"🚀 Starting acceptance suite ({len(plan)} criteria, tolerance x{tolerance}, seed {seed})")

        initial_state: SuiteState = {
            "only": only,
            "tolerance": float(tolerance),
            "seed": int(seed),
            "plan": [],
            "current_index": 0,
            "results": [],
            "summary": "",
            "report_path": report_path,
            "report_written": None,
            "session_id": session_id,
            "start_time": datetime.now().isoformat(),
        }

        config = {"configurable": {"thread_id": session_id}, "recursion_limit": 4 * len(plan) + 10}
        try:
            result = self.graph.invoke(initial_state, config=config)
        except Exception as e:
            logger.error(f"❌ Error in suite graph: {e}")
            return {"success": False, "error": str(e), "results": [], "summary": "", "report": None}
        finally:
            cleanup_evaluation_cache()

        results = result.get("results", [])
        return {
            "success": all(r["passed"] for r in results),
            "results": results,
            "summary": result.get("summary", ""),
            "report": result.get("report_written"),
            "metadata": {"session_id": session_id, "start_time": initial_state["start_time"]},
        }


def run_suite(only: Optional[List[str]] = None, tolerance: float = 1.0, seed: int = 0,
              report_path: Optional[str] = None) -> Dict[str, Any]:
    return SuiteGraph().run_suite(only, tolerance, seed, report_path)
