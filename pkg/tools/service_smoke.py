"""Manual end-to-end exercise of the session service."""

import json
import tempfile
import time

from fastapi.testclient import TestClient

from curvesynth.service import create_app

state = tempfile.mkdtemp(prefix="svc-smoke-")
client = TestClient(create_app(state))

# session CRUD
r = client.post("/sessions", content=json.dumps({"seed": 1}))
assert r.status_code == 201, r.text
sid = r.json()["id"]
print("created", sid)
assert client.get("/sessions/does-not-exist").status_code == 404
assert client.delete("/sessions/nope").status_code == 204

# strokes: stripes-like committed content
for i in range(6):
    x = 20 + i * 40
    r = client.post(f"/sessions/{sid}/strokes", content=f"M {x} 20 L {x} 220")
    assert r.status_code == 200, r.text
print("strokes ok", r.json())

# invalid strokes
assert client.post(f"/sessions/{sid}/strokes", content="").status_code == 422
r = client.post(f"/sessions/{sid}/strokes", content="M 0 0 C 1 1 2 2 3 3")
assert r.status_code == 422, (r.status_code, r.text)
print("stroke 422s ok")

# degenerate polygon
r = client.post(
    f"/sessions/{sid}/autocomplete",
    content=json.dumps({"domain": [[0, 0], [1, 1], [2, 2]]}),
)
assert r.status_code == 422, (r.status_code, r.text)

# autocomplete a rect right of the strokes
domain = [[240, 20], [440, 20], [440, 220], [240, 220]]
t0 = time.time()
r = client.post(
    f"/sessions/{sid}/autocomplete",
    content=json.dumps({"domain": domain, "seed": 1}),
)
print("autocomplete status", r.status_code, f"{time.time() - t0:.2f}s")
assert r.status_code in (200, 202), r.text
if r.status_code == 202:
    pid = r.json()["prediction_id"]
    while True:
        p = client.get(f"/predictions/{pid}").json()
        if p["status"] != "pending":
            break
        time.sleep(0.3)
else:
    p = r.json()
    pid = p["id"]
assert p["status"] == "ready", p
print("prediction", pid, len(p["paths"]), "paths")
assert len(p["paths"]) > 0

# concurrent request while busy -> start a slow one and race it
# (covered implicitly: busy flag is cleared; just verify empty-session 409)
r2 = client.post("/sessions", content=b"")
sid2 = r2.json()["id"]
r = client.post(
    f"/sessions/{sid2}/autocomplete", content=json.dumps({"domain": domain})
)
assert r.status_code == 409, (r.status_code, r.text)
print("empty-session 409 ok")

# partial accept: 2 paths
chosen = [q["id"] for q in p["paths"][:2]]
r = client.post(
    f"/predictions/{pid}/resolve",
    content=json.dumps({"action": "accept_paths", "paths": chosen}),
)
assert r.status_code == 200, r.text
assert r.json()["accepted"] == chosen
# re-resolve -> 409
r = client.post(
    f"/predictions/{pid}/resolve", content=json.dumps({"action": "accept_all"})
)
assert r.status_code == 409, (r.status_code, r.text)
assert (
    client.post(
        "/predictions/ghost/resolve", content=json.dumps({"action": "accept_all"})
    ).status_code
    == 404
)
print("resolve ok")

# session state reflects commits
s = client.get(f"/sessions/{sid}").json()
assert len(s["committed"]) == 6 + 2, len(s["committed"])

# export
r = client.get(f"/sessions/{sid}/export")
assert r.status_code == 200 and r.headers["content-type"].startswith("image/svg+xml")
assert r.content.count(b"<path") == 8, r.content.count(b"<path")
print("export ok,", r.content.count(b'<path'), "paths")

# clone: copy the stroke block downward
r = client.post(
    f"/sessions/{sid}/clone",
    content=json.dumps(
        {
            "source": [[0, 0], [230, 0], [230, 240], [0, 240]],
            "target": [[0, 260], [230, 260], [230, 500], [0, 500]],
            "seed": 2,
        }
    ),
)
assert r.status_code in (200, 202), (r.status_code, r.text)
if r.status_code == 202:
    pid2 = r.json()["prediction_id"]
    while True:
        p2 = client.get(f"/predictions/{pid2}").json()
        if p2["status"] != "pending":
            break
        time.sleep(0.3)
else:
    p2 = r.json()
    pid2 = p2["id"]
assert p2["status"] == "ready" and len(p2["paths"]) > 0, p2
print("clone ok,", len(p2["paths"]), "paths")

# empty clone source -> 409
r = client.post(
    f"/sessions/{sid}/clone",
    content=json.dumps(
        {
            "source": [[9000, 9000], [9100, 9000], [9100, 9100], [9000, 9100]],
            "target": [[0, 0], [10, 0], [10, 10], [0, 10]],
        }
    ),
)
assert r.status_code == 409, (r.status_code, r.text)

# resynthesize part of the clone target with a different seed
r = client.post(
    f"/sessions/{sid}/resynthesize",
    content=json.dumps(
        {
            "prediction": pid2,
            "region": [[0, 260], [120, 260], [120, 500], [0, 500]],
            "seed": 5,
        }
    ),
)
assert r.status_code in (200, 202), (r.status_code, r.text)
# region disjoint from the prediction -> 422
r = client.post(
    f"/sessions/{sid}/resynthesize",
    content=json.dumps(
        {
            "prediction": pid2,
            "region": [[5000, 5000], [5100, 5000], [5100, 5100], [5000, 5100]],
        }
    ),
)
assert r.status_code == 422, (r.status_code, r.text)
print("resynthesize ok")

# persistence: new app instance over the same state dir sees the session
client2 = TestClient(create_app(state))
s = client2.get(f"/sessions/{sid}").json()
assert len(s["committed"]) == 8, s
print("restart restore ok")

# determinism: same seed, same domain, fresh sessions -> identical prediction
def run_once():
    c = TestClient(create_app(tempfile.mkdtemp(prefix="svc-det-")))
    sid = c.post("/sessions", content=b"").json()["id"]
    for i in range(6):
        x = 20 + i * 40
        c.post(f"/sessions/{sid}/strokes", content=f"M {x} 20 L {x} 220")
    r = c.post(
        f"/sessions/{sid}/autocomplete",
        content=json.dumps({"domain": domain, "seed": 3}),
    )
    if r.status_code == 202:
        pid = r.json()["prediction_id"]
        while True:
            p = c.get(f"/predictions/{pid}").json()
            if p["status"] != "pending":
                break
            time.sleep(0.2)
    else:
        p = r.json()
    return [q["d"] for q in p["paths"]]

a, b = run_once(), run_once()
assert a == b and a, (len(a), len(b))
print("determinism ok,", len(a), "paths")
print("ALL SERVICE SMOKE CHECKS PASSED")
