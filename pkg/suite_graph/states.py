from typing import Dict, List, Optional, TypedDict


class SuiteState(TypedDict):
    """
    State carried through the acceptance-suite graph
    """
    # Run input
    only: List[str]
    tolerance: float
    seed: int

    # Planning phase
    plan: List[str]
    current_index: int

    # Evaluation phase
    results: List[Dict]

    # Reporting
    summary: str
    report_path: Optional[str]
    report_written: Optional[str]

    # Metadata
    session_id: str
    start_time: str
