"""Server half of the annotation validation contract.

The console ships a client-side validator that must agree with the server
on every case in frontend/tests/fixtures/annotation-validation.json: same
accept/reject decision, same error field. The vitest suite drives the
client half against the same file.
"""
import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from briefmix.api import create_app
from briefmix.fixtures import demo_draft
from briefmix.model import draft_to_dict
from briefmix.store import ProjectStore

FIXTURE = (Path(__file__).resolve().parent.parent / "frontend" / "tests"
           / "fixtures" / "annotation-validation.json")
CASES = json.loads(FIXTURE.read_text(encoding="utf-8"))["cases"]


@pytest.fixture
def client(tmp_path):
    store = ProjectStore(tmp_path / "proj")
    app = create_app(store)
    c = TestClient(app, raise_server_exceptions=False)
    d = draft_to_dict(demo_draft())
    d["annotations"] = {}
    assert c.post("/drafts", json=d).status_code == 201
    return c


@pytest.mark.parametrize("case", CASES, ids=[c["name"] for c in CASES])
def test_server_verdict_matches_fixture(client, case):
    r = client.put(f"/drafts/{demo_draft().id}/annotations",
                   json={case["message_id"]: case["annotation"]})
    if case["valid"]:
        assert r.status_code == 200, r.text
    else:
        assert r.status_code == 400, r.text
        fields = {e["field"] for e in r.json()["errors"]}
        assert case["error_field"] in fields, (case["error_field"], fields)
