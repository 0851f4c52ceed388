#!/usr/bin/env python3
"""Record HTTP API responses for the three reference flows as UI fixtures.

The frontend's contract tests assert that every number the UI renders is
present verbatim in these files. Regenerate after API or data changes:

    python3 scripts/record_ui_fixtures.py
"""

import json
import sys
from pathlib import Path

from fastapi.testclient import TestClient

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from opticopilot.config import AppConfig, build_runtime  # noqa: E402
from opticopilot.evalharness import CASE2_CLARIFICATION, CASE2_INPUT, CASE3_INPUT  # noqa: E402
from opticopilot.service.app import create_app  # noqa: E402
from opticopilot.store import SessionStore  # noqa: E402

CASE1_INPUT = (
    "We need a high-availability optical network connecting SITE1 (core), "
    "SITE2 (edge) and SITE3 (hub) support continuous operation with at least 3 "
    "geographically disjoint fiber paths between each pair of sites Maximum "
    "acceptable latency per path is 10 milliseconds Our total budget for "
    "components is $1500000"
)

FIXTURES = Path(__file__).resolve().parents[1] / "frontend" / "fixtures"


def dump(name: str, payload: dict) -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    (FIXTURES / name).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {name}")


def main() -> None:
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        app = create_app(
            runtime=build_runtime(AppConfig()), store=SessionStore(Path(tmp) / "s")
        )
        client = TestClient(app)

        # Case 1: complete pipeline success
        sid = client.post("/intents", json={"text": CASE1_INPUT}).json()["session_id"]
        dump("case1.session.json", client.get(f"/sessions/{sid}").json())
        dump("case1.intent.json", client.get(f"/sessions/{sid}/intent").json())
        dump("case1.plan.json", client.get(f"/sessions/{sid}/plan").json())
        dump("case1.design.json", client.get(f"/sessions/{sid}/design").json())

        # Case 2: clarification loop
        sid = client.post("/intents", json={"text": CASE2_INPUT}).json()["session_id"]
        dump("case2.session.json", client.get(f"/sessions/{sid}").json())
        client.post(f"/sessions/{sid}/clarify", json={"text": CASE2_CLARIFICATION})
        dump("case2.clarified.session.json", client.get(f"/sessions/{sid}").json())
        dump("case2.design.json", client.get(f"/sessions/{sid}/design").json())
        dump("case2.intent.json", client.get(f"/sessions/{sid}/intent").json())

        # Case 3: graceful degradation
        sid = client.post("/intents", json={"text": CASE3_INPUT}).json()["session_id"]
        dump("case3.session.json", client.get(f"/sessions/{sid}").json())
        dump("case3.intent.json", client.get(f"/sessions/{sid}/intent").json())
        dump("case3.design.json", client.get(f"/sessions/{sid}/design").json())


if __name__ == "__main__":
    main()
