import logging
import time
from typing import Dict

from dotenv import load_dotenv

from utils.pdf_gen import ReportGenerator

from .criteria import RunContext, resolve
from .global_state import get_evaluation_cache
from .states import SuiteState

load_dotenv()

logger = logging.getLogger(__name__)


class SuiteNodes:
    """Node functions for the acceptance-suite graph"""

    def __init__(self):
        self.cache = get_evaluation_cache()

    def plan_node(self, state: SuiteState) -> SuiteState:
        """Resolve the requested criteria into an ordered plan"""
        plan = [c.id for c in resolve(state.get("only") or [])]
        state["plan"] = plan
        state["current_index"] = 0
        state["results"] = []
        logger.info(f"📋 Plan: {len(plan)} criteria ({', '.join(plan)})")
        return state

    def run_node(self, state: SuiteState) -> SuiteState:
        """Run the criterion at current_index and record its outcome"""
        index = state["current_index"]
        criterion = resolve([state["plan"][index]])[0]
        context = RunContext(tolerance=state["tolerance"], seed=state["seed"], cache=self.cache)
        logger.info(f"🧪 [{index + 1}/{len(state['plan'])}] {criterion.id}: {criterion.title}")

        started = time.perf_counter()
        record: Dict = {"id": criterion.id, "title": criterion.title}
        try:
            passed, detail = criterion.check(context)
            record.update(success=True, passed=bool(passed), detail=detail)
        except Exception as e:
            logger.error(f"❌ {criterion.id} raised: {e}")
            record.update(success=False, passed=False, error=f"{type(e).__name__}: {e}")
        record["seconds"] = time.perf_counter() - started

        marker = "✅" if record["passed"] else "❌"
        logger.info(f"{marker} {criterion.id} in {record['seconds']:.2f}s: {record.get('detail') or record.get('error')}")

        state["results"] = state["results"] + [record]
        state["current_index"] = index + 1
        return state

    def review_node(self, state: SuiteState) -> SuiteState:
        """Summarize what has run so far"""
        results = state["results"]
        passed = sum(1 for r in results if r["passed"])
        state["summary"] = f"{passed}/{len(results)} criteria passed"
        if state["current_index"] >= len(state["plan"]):
            logger.info(f"📊 {state['summary']}")
        return state

    def report_node(self, state: SuiteState) -> SuiteState:
        """Write the PDF report"""
        generator = ReportGenerator()
        markdown = generator.suite_markdown(
            state["results"],
            {"tolerance": state["tolerance"], "seed": state["seed"], "session": state["session_id"]},
        )
        state["report_written"] = generator.generate_pdf(markdown, state["report_path"])
        return state
