import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ordlog import ColumnMap, EventLog, IngestConfig, parse_log
from ordlog.order import transitive_closure

DATA = Path(__file__).parent / "data"

TABLE1_IDS = [
    "36533", "36534", "36535", "36536", "36537", "36538",
    "36539", "36540", "36541", "36542", "36543", "36544",
]


@pytest.fixture(scope="session")
def table1_bytes() -> bytes:
    return (DATA / "table1.csv").read_bytes()


@pytest.fixture(scope="session")
def table1_cfg() -> IngestConfig:
    return IngestConfig(column_map=ColumnMap(id="event_id"))


@pytest.fixture(scope="session")
def table1_log(table1_bytes, table1_cfg) -> EventLog:
    return parse_log(table1_bytes, table1_cfg)


@pytest.fixture(scope="session")
def table1_row_order_log(table1_bytes) -> EventLog:
    cfg = IngestConfig(
        column_map=ColumnMap(id="event_id"), explicit_order_source="row_order_global"
    )
    return parse_log(table1_bytes, cfg)


@pytest.fixture()
def nurse_log() -> EventLog:
    """Recorded-late blood sample, auto-logged approval, date-only x-ray; the
    known real order contradicts the recorded timestamps."""
    base = 1_621_382_400_000  # 2021-05-19T00:00:00Z
    return EventLog(
        ["n1", "n2", "n3"],
        ["p1", "p1", "p1"],
        ["blood sample", "insurance approval", "x-ray"],
        [base + (17 * 60 + 55) * 60_000, base + (17 * 60 + 15) * 60_000, base],
        order_pairs=[(0, 1), (1, 2)],
    )


def fig3_poset(exam: str = "et", outcome: str = "pay"):
    """One of the four concurrent-checks runs: reg < {ct, ch, exam} < dec < outcome."""
    labels = ["reg", "ct", "ch", exam, "dec", outcome]
    pairs = [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4), (4, 5)]
    return transitive_closure(pairs, 6, labels)


def fig3_case_events(case_id: str, exam: str, outcome: str, start_ms: int, step_ms: int):
    """Event rows realizing a fig3-shaped case as a timestamped log fragment."""
    acts = ["reg", "ct", "ch", exam, "dec", outcome]
    rows = []
    for k, a in enumerate(acts):
        rows.append((f"{case_id}-{k}", case_id, a, start_ms + k * step_ms))
    return rows
