"""Session-oriented HTTP API for interactive pattern authoring.

Workflow: create a session, post strokes, request autocompletion of a region
(or clone a source region to a target), accept / partially accept / reject
the returned predictions, optionally re-synthesize a region, export SVG.

State is persisted as one JSON snapshot per session under the state
directory (``CURVESYNTH_STATE_DIR`` or a temp directory), rewritten on every
mutation, so a restarted server resumes where it left off.
"""

from __future__ import annotations

import json
import logging
import os
import pathlib
import tempfile
import threading

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .geometry import Point2, Region, contains
from .graph import SynthesisConfig
from .io import (
    ParseError,
    VectorDocument,
    emit_svg,
    parse_path_data,
    path_to_data,
)
from .synthesis import SynthesisSession

log = logging.getLogger(__name__)

# Synchronous responses are only given when synthesis finishes this quickly;
# otherwise the client gets 202 plus a polling URL.
_SYNC_WAIT_S = 1.0


def _paths_to_doc(entries: list) -> VectorDocument:
    doc = VectorDocument()
    for entry in entries:
        doc.paths.extend(parse_path_data(entry["d"]))
    return doc


def _region_from_polygon(polygon) -> Region:
    if not isinstance(polygon, (list, tuple)) or len(polygon) < 3:
        raise ValueError("polygon needs at least 3 [x, y] points")
    return Region(tuple(Point2(float(p[0]), float(p[1])) for p in polygon))


def _paths_in_region(entries: list, region: Region) -> list:
    hits = []
    for entry in entries:
        for path in parse_path_data(entry["d"]):
            pts = path.flatten()
            if any(contains(region, Point2(x, y)) for x, y in pts):
                hits.append(entry)
                break
    return hits


class _Session:
    def __init__(self, sid: str, seed: int):
        self.id = sid
        self.seed = seed
        self.committed: list = []  # [{"id": str, "d": str}]
        self.predictions: dict = {}  # pid -> prediction dict
        self.next_stroke = 0
        self.next_prediction = 0
        self.lock = threading.Lock()
        self.busy = False

    def snapshot(self) -> dict:
        return {
            "id": self.id,
            "seed": self.seed,
            "committed": list(self.committed),
            "predictions": {
                pid: {k: v for k, v in p.items() if k != "thread"}
                for pid, p in self.predictions.items()
            },
            "next_stroke": self.next_stroke,
            "next_prediction": self.next_prediction,
        }

    @staticmethod
    def restore(data: dict) -> "_Session":
        s = _Session(data["id"], data["seed"])
        s.committed = list(data.get("committed", []))
        s.predictions = dict(data.get("predictions", {}))
        # a synthesis that was in flight when the server stopped is lost
        for p in s.predictions.values():
            if p.get("status") == "pending":
                p["status"] = "failed"
                p["error"] = "server restarted during synthesis"
        s.next_stroke = data.get("next_stroke", len(s.committed))
        s.next_prediction = data.get("next_prediction", len(s.predictions))
        return s


def create_app(state_dir: str = None) -> FastAPI:
    app = FastAPI(title="curvesynth service")
    state_path = pathlib.Path(
        state_dir
        or os.environ.get("CURVESYNTH_STATE_DIR")
        or tempfile.mkdtemp(prefix="curvesynth-")
    )
    state_path.mkdir(parents=True, exist_ok=True)

    sessions: dict = {}
    registry_lock = threading.Lock()
    next_session = [0]

    # -- persistence ---------------------------------------------------------

    def persist(session: _Session):
        path = state_path / f"{session.id}.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(session.snapshot(), indent=1))
        tmp.replace(path)

    def forget(sid: str):
        (state_path / f"{sid}.json").unlink(missing_ok=True)

    for f in sorted(state_path.glob("*.json")):
        try:
            s = _Session.restore(json.loads(f.read_text()))
            sessions[s.id] = s
            num = int(s.id.rsplit("-", 1)[-1])
            next_session[0] = max(next_session[0], num + 1)
        except (ValueError, KeyError) as exc:
            log.warning("skipping unreadable session snapshot %s: %s", f, exc)

    # -- helpers ---------------------------------------------------------------

    def error(status: int, message: str) -> JSONResponse:
        return JSONResponse({"detail": message}, status_code=status)

    def get_session(sid: str):
        return sessions.get(sid)

    def find_prediction(pid: str):
        for s in sessions.values():
            if pid in s.predictions:
                return s, s.predictions[pid]
        return None, None

    def public_prediction(p: dict) -> dict:
        return {k: v for k, v in p.items() if k not in ("thread", "exemplar")}

    def run_synthesis(session: _Session, pred: dict):
        try:
            exemplar = _paths_to_doc(pred["exemplar"])
            region = _region_from_polygon(pred["domain"])
            fixed = _paths_to_doc(session.committed)
            cfg = SynthesisConfig.from_dict(
                {**pred.get("config", {}), "seed": pred["seed"]}
            )
            synth = SynthesisSession(exemplar, region, cfg, fixed_doc=fixed)
            synth.run("patch")
            doc = synth.reconstruct()
            paths = [
                {"id": f"{pred['id']}-p{i}", "d": path_to_data(p)}
                for i, p in enumerate(doc.paths)
            ]
            with session.lock:
                pred["paths"] = paths
                pred["status"] = "ready"
        except Exception as exc:  # noqa: BLE001 - surface any failure to the client
            log.exception("synthesis failed for %s", pred["id"])
            with session.lock:
                pred["status"] = "failed"
                pred["error"] = str(exc)
        finally:
            with session.lock:
                session.busy = False
            persist(session)

    def start_prediction(session: _Session, exemplar_entries, polygon, config, seed):
        with session.lock:
            if session.busy:
                return error(409, "a synthesis request is already in flight")
            pid = f"{session.id}-pred-{session.next_prediction}"
            session.next_prediction += 1
            pred = {
                "id": pid,
                "status": "pending",
                "domain": polygon,
                "seed": seed,
                "config": config or {},
                "paths": [],
                "exemplar": exemplar_entries,
            }
            session.predictions[pid] = pred
            session.busy = True
        persist(session)
        thread = threading.Thread(
            target=run_synthesis, args=(session, pred), daemon=True
        )
        pred["thread"] = thread
        thread.start()
        thread.join(_SYNC_WAIT_S)
        with session.lock:
            if pred["status"] == "pending":
                return JSONResponse(
                    {"prediction_id": pid, "poll": f"/predictions/{pid}"},
                    status_code=202,
                )
            if pred["status"] == "failed":
                return error(500, pred.get("error", "synthesis failed"))
            return JSONResponse(public_prediction(pred), status_code=200)

    # -- session CRUD ----------------------------------------------------------

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        body = await request.body()
        seed = 0
        if body:
            try:
                seed = int(json.loads(body).get("seed", 0))
            except (ValueError, AttributeError, json.JSONDecodeError):
                return error(422, "body must be a JSON object with optional 'seed'")
        with registry_lock:
            sid = f"session-{next_session[0]}"
            next_session[0] += 1
            session = _Session(sid, seed)
            sessions[sid] = session
        persist(session)
        return {"id": sid, "seed": seed}

    @app.get("/sessions/{sid}")
    def get_session_state(sid: str):
        session = get_session(sid)
        if session is None:
            return error(404, f"unknown session {sid}")
        with session.lock:
            return {
                "id": session.id,
                "seed": session.seed,
                "committed": list(session.committed),
                "predictions": {
                    pid: public_prediction(p)
                    for pid, p in session.predictions.items()
                },
            }

    @app.delete("/sessions/{sid}", status_code=204)
    def delete_session(sid: str):
        sessions.pop(sid, None)
        forget(sid)
        return Response(status_code=204)

    # -- strokes ---------------------------------------------------------------

    @app.post("/sessions/{sid}/strokes")
    async def add_stroke(sid: str, request: Request):
        session = get_session(sid)
        if session is None:
            return error(404, f"unknown session {sid}")
        body = (await request.body()).decode("utf-8", errors="replace").strip()
        if not body:
            return error(422, "empty path data")
        try:
            paths = parse_path_data(body)
        except ParseError as exc:
            return error(422, str(exc))
        if not paths:
            return error(422, "path data contains no drawable path")
        with session.lock:
            stroke_id = f"{sid}-stroke-{session.next_stroke}"
            session.next_stroke += 1
            session.committed.append({"id": stroke_id, "d": body})
        persist(session)
        return {"id": stroke_id}

    # -- synthesis requests ------------------------------------------------------

    @app.post("/sessions/{sid}/autocomplete")
    async def autocomplete(sid: str, request: Request):
        session = get_session(sid)
        if session is None:
            return error(404, f"unknown session {sid}")
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError:
            return error(422, "body must be JSON")
        polygon = body.get("domain")
        try:
            _region_from_polygon(polygon)
        except ValueError as exc:
            return error(422, f"bad domain polygon: {exc}")
        with session.lock:
            if not session.committed:
                return error(409, "session has no committed paths to learn from")
            committed = list(session.committed)
        return start_prediction(
            session,
            committed,
            polygon,
            body.get("config"),
            int(body.get("seed", session.seed)),
        )

    @app.post("/sessions/{sid}/clone")
    async def clone(sid: str, request: Request):
        session = get_session(sid)
        if session is None:
            return error(404, f"unknown session {sid}")
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError:
            return error(422, "body must be JSON")
        try:
            source = _region_from_polygon(body.get("source"))
            _region_from_polygon(body.get("target"))
        except ValueError as exc:
            return error(422, f"bad region polygon: {exc}")
        with session.lock:
            exemplar = _paths_in_region(session.committed, source)
        if not exemplar:
            return error(409, "source region contains no committed content")
        return start_prediction(
            session,
            exemplar,
            body["target"],
            body.get("config"),
            int(body.get("seed", session.seed)),
        )

    @app.post("/sessions/{sid}/resynthesize")
    async def resynthesize(sid: str, request: Request):
        session = get_session(sid)
        if session is None:
            return error(404, f"unknown session {sid}")
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError:
            return error(422, "body must be JSON")
        pid = body.get("prediction")
        pred = session.predictions.get(pid)
        if pred is None:
            return error(404, f"unknown prediction {pid}")
        try:
            region = _region_from_polygon(body.get("region"))
        except ValueError as exc:
            return error(422, f"bad region polygon: {exc}")
        old_region = _region_from_polygon(pred["domain"])
        rx0, ry0, rx1, ry1 = region.bbox()
        ox0, oy0, ox1, oy1 = old_region.bbox()
        if rx1 < ox0 or rx0 > ox1 or ry1 < oy0 or ry0 > oy1:
            return error(422, "region lies outside the prediction's domain")
        return start_prediction(
            session,
            list(pred["exemplar"]),
            body["region"],
            body.get("config", pred.get("config")),
            int(body.get("seed", pred["seed"])),
        )

    # -- prediction polling / resolution ------------------------------------------

    @app.get("/predictions/{pid}")
    def get_prediction(pid: str):
        _, pred = find_prediction(pid)
        if pred is None:
            return error(404, f"unknown prediction {pid}")
        return public_prediction(pred)

    @app.post("/predictions/{pid}/resolve")
    async def resolve(pid: str, request: Request):
        session, pred = find_prediction(pid)
        if pred is None:
            return error(404, f"unknown prediction {pid}")
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError:
            return error(422, "body must be JSON")
        action = body.get("action")
        if action not in ("accept_all", "reject_all", "accept_paths"):
            return error(422, "action must be accept_all, reject_all or accept_paths")
        with session.lock:
            if pred["status"] == "resolved":
                return error(409, f"prediction {pid} already resolved")
            if pred["status"] != "ready":
                return error(409, f"prediction {pid} is {pred['status']}")
            if action == "accept_all":
                accepted = list(pred["paths"])
            elif action == "reject_all":
                accepted = []
            else:
                wanted = set(body.get("paths", []))
                known = {p["id"] for p in pred["paths"]}
                missing = wanted - known
                if missing:
                    return error(422, f"unknown path ids: {sorted(missing)}")
                accepted = [p for p in pred["paths"] if p["id"] in wanted]
            session.committed.extend(accepted)
            pred["status"] = "resolved"
            pred["accepted"] = [p["id"] for p in accepted]
        persist(session)
        return {"accepted": [p["id"] for p in accepted]}

    # -- export -----------------------------------------------------------------

    @app.get("/sessions/{sid}/export")
    def export(sid: str):
        session = get_session(sid)
        if session is None:
            return error(404, f"unknown session {sid}")
        with session.lock:
            doc = _paths_to_doc(session.committed)
        return Response(content=emit_svg(doc), media_type="image/svg+xml")

    return app


app = create_app()
