from .criteria import CRITERIA, Criterion, RunContext, resolve
from .graph import SuiteGraph, run_suite
from .states import SuiteState

__all__ = ['CRITERIA', 'Criterion', 'RunContext', 'resolve', 'SuiteGraph', 'run_suite', 'SuiteState']
